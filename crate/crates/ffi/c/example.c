#include <math.h>
#include <stdio.h>

#include "pmc.h"

int main(void) {
  PmcPrescription *h = NULL;
  if (pmc_prescription_parse("{\"type\":\"constant\",\"value\":1.0}", &h) != PMC_STATUS_OK) {
    fprintf(stderr, "%s\n", pmc_last_error());
    return 1;
  }

  double rho = 0.0;
  pmc_cylinder_radius(h, -1, &rho);

  PmcProfile *sphere = NULL;
  if (pmc_sphere_build(h, -1, 1e-3, &sphere) != PMC_STATUS_OK) {
    fprintf(stderr, "%s\n", pmc_last_error());
    return 1;
  }
  double equator = 0.0, height = 0.0;
  pmc_profile_summary(sphere, &equator, &height);
  printf("cylinder %.12f\nequator %.6f\nsamples %zu\n", rho, equator, pmc_profile_len(sphere));

  PmcPrescription *bad = NULL;
  PmcStatus status = pmc_prescription_parse("{\"type\":\"cubic\"}", &bad);
  printf("status %d %s\n", (int)status, bad == NULL ? "null" : "set");

  pmc_profile_free(sphere);
  pmc_prescription_free(h);
  return fabs(equator - log(3.0)) < 1e-3 ? 0 : 2;
}
