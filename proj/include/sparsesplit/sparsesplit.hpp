#pragma once

#include "baseline.hpp"
#include "binning.hpp"
#include "counters.hpp"
#include "datagen.hpp"
#include "point.hpp"
#include "split.hpp"
#include "stream_io.hpp"
#include "upd_ent.hpp"
#include "upd_gini.hpp"
