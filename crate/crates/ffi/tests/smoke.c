#include <math.h>
#include <stdio.h>
#include "besov_dunkl.h"

int main(void) {
    double re, im;
    if (bd_dunkl_kernel(0.5, 1.0, 2.0, &re, &im) != BD_STATUS_OK || re * re + im * im > 1.0)
        return 1;
    BdGrid *grid = NULL;
    if (bd_grid_new(0.0, 20.0, 128, &grid) != BD_STATUS_OK)
        return 2;
    BdFunction *f = NULL;
    if (bd_function_from_catalog(grid, "gaussian", &f) != BD_STATUS_OK)
        return 3;
    double norm = 0.0;
    if (bd_lp_norm(f, 2.0, &norm) != BD_STATUS_OK || !(norm > 0.0))
        return 4;
    if (bd_grid_new(-0.75, 20.0, 128, &grid) != BD_STATUS_DOMAIN)
        return 5;
    char msg[128];
    if (bd_last_error(msg, sizeof msg) == 0)
        return 6;
    bd_function_free(f);
    printf("ok\n");
    return 0;
}
