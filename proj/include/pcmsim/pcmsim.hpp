#pragma once

#include "pcmsim/error.hpp"
#include "pcmsim/random.hpp"
#include "pcmsim/device.hpp"
#include "pcmsim/crossbar.hpp"
#include "pcmsim/network.hpp"
#include "pcmsim/experiments.hpp"
#include "pcmsim/io.hpp"
