#pragma once

namespace beamsim {

// Result of one probe-and-lock sweep.
struct SweepOutcome {
    int t = 0;
    int b_best = 0;           // best probed beam
    int b_lock = 0;           // beam committed for data transmission
    double snr_lock_db = 0.0; // measured SNR of the locked beam
    int K = 0;                // probes spent this sweep
    bool shield = false;      // lock differs from best probed beam
    bool outage = false;      // locked SNR below the outage threshold
};

}  // namespace beamsim
