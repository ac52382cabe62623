/* SPDX-License-Identifier: Apache-2.0 */

#include <stdio.h>
#include "tangle_sim.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            const char *msg = ts_last_error_message();                \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,    \
                    msg ? msg : "no message");                        \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    TsTangle *t = ts_tangle_new();
    uint64_t genesis = 0, a = 0, b = 0, w = 0;
    CHECK(ts_tangle_add(t, &genesis, 1, 1.0, false, &a) == TS_STATUS_OK);
    CHECK(ts_tangle_add(t, &a, 1, 2.0, true, &b) == TS_STATUS_OK);
    CHECK(ts_tangle_cumulative_weight(t, 0, &w) == TS_STATUS_OK && w == 3);
    ts_tangle_free(t);

    TsConfig *cfg = ts_config_default();
    TsTrace *u = NULL, *p = NULL;
    CHECK(ts_paired_runs(cfg, &u, &p) == TS_STATUS_OK);
    TsComparison cmp;
    CHECK(ts_compare(u, p, &cmp) == TS_STATUS_OK);
    CHECK(cmp.ptsa_wins);
    printf("records=%zu reduction=%.3f\n", ts_trace_len(p), cmp.latency_reduction);
    ts_trace_free(u);
    ts_trace_free(p);
    ts_config_free(cfg);
    return 0;
}
