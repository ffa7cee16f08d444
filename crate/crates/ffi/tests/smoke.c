#include <math.h>
#include <stdio.h>

#include "cogrelay.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    CrStatus s_ = (call);                                                  \
    if (s_ != CR_STATUS_OK) {                                              \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, cr_last_error()); \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  double pl;
  CHECK(cr_log_distance_pl(44.19, 1.0, 3.46, 10.0, &pl));
  if (fabs(pl - 78.79) > 1e-9) return 2;

  CrSnrDist prs[4] = {{CR_FADING_KIND_NAKAGAMI, 266.0, 1.13},
                      {CR_FADING_KIND_NAKAGAMI, 489.0, 0.98},
                      {CR_FADING_KIND_NAKAGAMI, 57.34, 1.11},
                      {CR_FADING_KIND_NAKAGAMI, 94.20, 1.25}};
  CrSnrDist ids[5] = {{CR_FADING_KIND_NAKAGAMI, 952.0, 1.23},
                      {CR_FADING_KIND_NAKAGAMI, 3.65e4, 1.28},
                      {CR_FADING_KIND_NAKAGAMI, 179.0, 1.17},
                      {CR_FADING_KIND_NAKAGAMI, 413.0, 1.16},
                      {CR_FADING_KIND_NAKAGAMI, 6.99e4, 1.23}};
  CrConstraintConfig cfg = cr_constraint_config_default();
  CrDecisionMatrix *m = NULL;
  CHECK(cr_decision_matrix_build(prs, 4, ids, 5, &cfg, &m));
  bool cell;
  CHECK(cr_decision_matrix_cell(m, 0, 1, &cell));
  if (!cell) return 3;
  CHECK(cr_decision_matrix_cell(m, 1, 1, &cell));
  if (cell) return 4;
  if (cr_decision_matrix_cell(m, 9, 0, &cell) != CR_STATUS_INVALID_ARGUMENT) return 5;
  cr_decision_matrix_free(m);

  if (cr_snr_cdf(NULL, 1.0, &pl) != CR_STATUS_NULL_POINTER) return 6;
  printf("ok %s\n", cr_version());
  return 0;
}
