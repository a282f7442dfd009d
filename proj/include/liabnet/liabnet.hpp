#pragma once

// Umbrella header for the whole library.

#include "liabnet/csv.hpp"
#include "liabnet/debtrank.hpp"
#include "liabnet/errors.hpp"
#include "liabnet/ingest.hpp"
#include "liabnet/io.hpp"
#include "liabnet/netstats.hpp"
#include "liabnet/network.hpp"
#include "liabnet/pipeline.hpp"
#include "liabnet/reconstruction.hpp"
#include "liabnet/synthgen.hpp"
#include "liabnet/util.hpp"
