#pragma once

// Umbrella header: rearrangement scheduling for stochastically loaded atom
// arrays under row/column tweezer constraints.

#include "qrm/aod.hpp"
#include "qrm/bench.hpp"
#include "qrm/bitgrid.hpp"
#include "qrm/grid.hpp"
#include "qrm/latency.hpp"
#include "qrm/packet.hpp"
#include "qrm/schedule_io.hpp"
#include "qrm/scheduler.hpp"
#include "qrm/shift_kernel.hpp"
#include "qrm/types.hpp"
