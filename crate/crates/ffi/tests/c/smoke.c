#include <stdio.h>
#include "integrality.h"
int main(void) {
    IntegralitySpec *s = NULL;
    int rc = integrality_spec_parse("seq a; rec: n^3*a[n] = (2*n-1)*(17*n^2-17*n+5)*a[n-1] - (n-1)^3*a[n-2];", &s);
    char *out = NULL;
    rc |= integrality_spec_run_json(s, 5, &out);
    printf("%d %s\n", rc, out);
    integrality_string_free(out);
    integrality_spec_free(s);
    return rc;
}
