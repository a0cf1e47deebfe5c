#pragma once

#include "pnr/params.hpp"
#include "pnr/simulate.hpp"

namespace pnr {
namespace presets {

// Calibrated parameters of the four-bit (16-level) detector used throughout
// the tests, docs, and example data. Bit 0 carries extra exposure from the
// state-preparation check.
DetectorParams fock_detector();

// Same detector calibrated with coherent-state preparation, which has a
// shorter bit-0 exposure.
DetectorParams coherent_detector();

// fock_detector() with the preparation contribution removed from bit 0,
// leaving only the measurement window itself. Used for error budgeting of
// the measurement alone.
DetectorParams fock_detector_measurement_only();

// Average-exposure reset model matching the analytic confusion matrix.
ResetModel default_reset();

// Reset-attempt pmf reproducing the measured reset statistics: mean 2.05
// attempts with 35.1% of resets needing more than one.
ResetModel empirical_reset();

}  // namespace presets
}  // namespace pnr
