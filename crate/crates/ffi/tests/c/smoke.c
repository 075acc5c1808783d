#include <math.h>
#include <stdio.h>
#include <string.h>

#include "dequant.h"

static int fail(const char *what) {
    const char *msg = dequant_last_error();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    DequantPoly *q = NULL, *p = NULL, *qp = NULL, *h = NULL;
    if (dequant_poly_parse("q", 1, &q) != DEQUANT_STATUS_OK) return fail("parse q");
    if (dequant_poly_parse("p", 1, &p) != DEQUANT_STATUS_OK) return fail("parse p");
    if (dequant_star(q, p, &qp) != DEQUANT_STATUS_OK) return fail("star");
    char *s = NULL;
    if (dequant_poly_render(qp, &s) != DEQUANT_STATUS_OK) return fail("render");
    if (strcmp(s, "q*p + 1/2*i*h") != 0) return fail("star value");
    dequant_string_free(s);

    DequantPoly *bad = NULL;
    if (dequant_poly_parse("q + * p", 1, &bad) != DEQUANT_STATUS_PARSE || bad != NULL) return fail("parse error");

    if (dequant_poly_parse("q^4 + 1/2*p^2", 1, &h) != DEQUANT_STATUS_OK) return fail("parse h");
    DequantReport *r = NULL;
    if (dequant_verify(h, &r) != DEQUANT_STATUS_OK || !dequant_report_is_exact(r)) return fail("verify");
    dequant_report_free(r);

    DequantObservables o;
    if (dequant_gaussian_observables(65, 1.0, 0.0, 0.0, sqrt(0.5), &o) != DEQUANT_STATUS_OK) return fail("wigner");
    if (fabs(o.norm - 1.0) > 1e-10 || fabs(o.purity - 1.0) > 1e-8) return fail("observables");

    dequant_poly_free(q);
    dequant_poly_free(p);
    dequant_poly_free(qp);
    dequant_poly_free(h);
    printf("ok %s\n", dequant_version());
    return 0;
}
