#include <stdio.h>
#include <stdlib.h>

#include "critnls.h"

int main(void) {
    CritnlsGrid *grid = NULL;
    CritnlsWave *wave = NULL;
    char msg[256];
    double lambda = 0.0, omega = 0.0;
    bool scaled = false;

    if (critnls_grid_new(1000, 3.0e5, 0.0, &grid) != CRITNLS_STATUS_OK) {
        critnls_last_error(msg, sizeof msg);
        fprintf(stderr, "grid: %s\n", msg);
        return 1;
    }
    if (critnls_wave_construct(grid, 4.0, 1.0, 0.01, &wave) != CRITNLS_STATUS_OK) {
        critnls_last_error(msg, sizeof msg);
        fprintf(stderr, "wave: %s\n", msg);
        critnls_grid_free(grid);
        return 1;
    }
    critnls_wave_scalars(wave, &lambda, &omega, &scaled);
    printf("critnls %s lambda/eps = %.6f omega = %.6e\n", critnls_version(), lambda / 0.01, omega);
    if (critnls_wave_construct(grid, 5.0, 1.0, 0.01, &wave) != CRITNLS_STATUS_INVALID_ARGUMENT) {
        return 1;
    }
    critnls_grid_free(grid);
    return 0;
}
