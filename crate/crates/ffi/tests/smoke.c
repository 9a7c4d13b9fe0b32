#include <math.h>
#include <stdio.h>
#include <string.h>

#include "wsplab.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        WsplabStatus s_ = (call);                                            \
        if (s_ != WSPLAB_STATUS_OK) {                                        \
            const char *m_ = wsplab_last_error_message();                    \
            fprintf(stderr, "%s -> %d: %s\n", #call, s_, m_ ? m_ : "(none)"); \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    WsplabGraphon *w = NULL;
    WsplabGraph *g = NULL;
    double eig[6], x[6] = {1, 1, 1, 1, 1, 1}, y[6], taps[2] = {0.5, 1.0}, t;

    CHECK(wsplab_graphon_builtin("constant:0.5", &w));
    CHECK(wsplab_graph_sample(w, 6, WSPLAB_SAMPLE_MODE_TEMPLATE, 0, 0, true, &g));
    CHECK(wsplab_graph_spectrum(g, true, eig, 6));
    CHECK(wsplab_filter_apply(g, taps, 2, true, x, y, 6));
    CHECK(wsplab_hom_density(g, "edge", &t));

    if (fabs(eig[0] - 0.5) > 1e-12 || fabs(y[0] - 1.0) > 1e-12 || fabs(t - 0.5) > 1e-15) {
        fprintf(stderr, "wrong values: %g %g %g\n", eig[0], y[0], t);
        return 1;
    }
    if (wsplab_graphon_builtin("nope", &w) != WSPLAB_STATUS_INVALID_ARGUMENT ||
        strstr(wsplab_last_error_message(), "nope") == NULL) {
        fprintf(stderr, "missing error report\n");
        return 1;
    }
    wsplab_graph_free(g);
    wsplab_graphon_free(w);
    printf("ok %s\n", wsplab_version());
    return 0;
}
