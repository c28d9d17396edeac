#include <math.h>
#include <stdio.h>
#include "arcwave.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        ArcwaveStatus s_ = (call);                                           \
        if (s_ != ARCWAVE_STATUS_OK) {                                       \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_,                \
                    arcwave_last_error());                                   \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    ArcwaveMaterial *m = NULL;
    if (arcwave_material_new(2.0, -1.0, 1.0, 10.0, &m) != ARCWAVE_STATUS_INVALID_MATERIAL || m != NULL) {
        return 2;
    }
    CHECK(arcwave_material_new(2.0, 1.0, 1.0, 10.0, &m));
    double ks, kp;
    CHECK(arcwave_material_wavenumbers(m, &ks, &kp));
    if (fabs(ks - 10.0) > 1e-14 || fabs(kp - 5.0) > 1e-14) return 3;

    ArcwaveProblem *p = NULL;
    CHECK(arcwave_problem_new(m, ARCWAVE_CURVE_CIRCLE, 1.0, 30, &p));
    ArcwaveSolution *s = NULL;
    CHECK(arcwave_solve_point_source(p, ARCWAVE_FORMULATION_DIR_SW, 0.0, 0.5, 1e-12, 500, &s));
    size_t it = 0;
    bool conv = false;
    CHECK(arcwave_solution_stats(s, &it, &conv, NULL));
    if (!conv || it == 0) return 4;
    double xy[2] = {0.0, 2.0}, u[4];
    CHECK(arcwave_solution_field(s, xy, 1, u));
    printf("%zu %.17g %.17g %.17g %.17g\n", it, u[0], u[1], u[2], u[3]);

    arcwave_solution_free(s);
    arcwave_problem_free(p);
    arcwave_material_free(m);
    return 0;
}
