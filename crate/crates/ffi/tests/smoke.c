#include <math.h>
#include <stdio.h>
#include "quantrate.h"

int main(void) {
    QrQuantizer *q = NULL;
    if (qr_quantizer_new_uniform(4, 1.0, &q) != QR_STATUS_OK) return 1;
    double a, b, g;
    if (qr_quantizer_gamma(q, &a, &b, &g) != QR_STATUS_OK) return 2;
    if (fabs(g - 0.07698600931286131) > 1e-14) return 3;
    QrMomentEstimate est;
    if (qr_estimate_moments(q, 1.0, 0.0, 10.0, 1.0, 1.0, 20000, 1, &est) != QR_STATUS_OK) return 4;
    if (est.n_samples != 20000) return 5;
    qr_quantizer_free(q);

    QrLoadingAnalysis la;
    if (qr_optimal_loading(4, &la) != QR_STATUS_OK) return 6;
    if (fabs(la.l_star - 2.344077765773948) > 1e-9) return 7;
    if (qr_optimal_loading(1, &la) != QR_STATUS_DOMAIN) return 8;
    if (qr_last_error_message() == NULL) return 9;
    printf("%.6f %s\n", la.l_star, qr_last_error_message());
    return 0;
}
