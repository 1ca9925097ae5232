/* Copyright 2026 The snear Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* Compiled as C to keep the public header C-clean. */
#include "snear/snear.h"

int snear_header_check_c(void) {
  snear_experiment* exp = 0;
  snear_status st = snear_experiment_from_text("graph.n = 4\n", &exp);
  if (st != SNEAR_OK) return (int)st;
  st = snear_experiment_validate(exp);
  snear_experiment_free(exp);
  return (int)st;
}
