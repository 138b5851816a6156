#pragma once

#include "arpsd/core_types.hpp"
#include "arpsd/preprocess.hpp"
#include "arpsd/ar_estim.hpp"
#include "arpsd/order_select.hpp"
#include "arpsd/spectral.hpp"
#include "arpsd/synthgen.hpp"
#include "arpsd/detect_eval.hpp"
#include "arpsd/cli_io.hpp"
