#pragma once

#include "smoothbl/core.hpp"
#include "smoothbl/rng.hpp"
#include "smoothbl/lp.hpp"
#include "smoothbl/measures.hpp"
#include "smoothbl/gbll.hpp"
#include "smoothbl/envelope.hpp"
#include "smoothbl/smoothing.hpp"
#include "smoothbl/gaussian.hpp"
#include "smoothbl/bounds.hpp"
#include "smoothbl/crsim.hpp"
#include "smoothbl/io.hpp"
