#include <math.h>
#include <stdio.h>
#include <string.h>

#include "conveq.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    const double square[] = {1, 1, -1, 1, -1, -1, 1, -1};
    ConveqBody *body = NULL;
    CHECK(conveq_body_polytope(square, 4, 2, &body) == CONVEQ_STATUS_OK);

    const double x[] = {0, 5};
    double p[2], residual;
    CHECK(conveq_project(body, x, 2, p, &residual) == CONVEQ_STATUS_OK);
    CHECK(fabs(p[0]) < 1e-12 && fabs(p[1] - 1) < 1e-12 && residual <= 1e-8);

    size_t count = 0;
    CHECK(conveq_extreme_points(body, NULL, 0, &count) == CONVEQ_STATUS_BUFFER_TOO_SMALL);
    CHECK(count == 4);

    const double inside[] = {0, 0};
    CHECK(conveq_locate_partition_cell(body, inside, 2, p) == CONVEQ_STATUS_INSIDE_BODY);
    CHECK(conveq_last_error_message() != NULL);

    char *report = NULL;
    CHECK(conveq_solve_json("{\"version\":1,\"dimension\":2,"
                            "\"body\":{\"type\":\"ball\",\"center\":[0,0],\"radius\":1},"
                            "\"problem\":{\"kind\":\"project\",\"xstar\":[3,4]}}",
                            &report) == CONVEQ_STATUS_OK);
    CHECK(strstr(report, "\"solutions\"") != NULL);
    conveq_string_free(report);

    conveq_body_free(body);
    printf("ok\n");
    return 0;
}
