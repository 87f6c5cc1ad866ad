#include <math.h>
#include <stdio.h>
#include "horoboundary.h"

int main(void) {
    HbClassification c;
    if (hb_classify(0, 0, 0, 5, &c) != HB_STATUS_OK || c.iso_visual) return 1;

    double d = 0.0;
    HbPoint a = {0.0, 1.0}, b = {0.0, 2.0};
    if (hb_torus_distance(a, b, &d) != HB_STATUS_OK || fabs(d - 0.5 * log(2.0)) > 1e-12) return 2;

    HbTorusQd *qd = NULL;
    if (hb_torus_qd_new(a, 0.0, 1.0, &qd) != HB_STATUS_OK) return 3;
    HbPoint r;
    double xi = 0.0;
    hb_torus_qd_ray(qd, 2.0, &r);
    if (hb_torus_qd_busemann_xi(qd, r, &xi) != HB_STATUS_OK || fabs(xi + 2.0) > 1e-10) return 4;
    hb_torus_qd_free(qd);

    HbPoint bad = {0.0, -1.0};
    if (hb_torus_distance(a, bad, &d) != HB_STATUS_INVALID_INPUT || hb_last_error_message() == NULL) return 5;

    printf("ok %.12f\n", d);
    return 0;
}
