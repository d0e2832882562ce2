#pragma once

#include "infovel/analysis.hpp"
#include "infovel/baseline.hpp"
#include "infovel/channel.hpp"
#include "infovel/core.hpp"
#include "infovel/engine.hpp"
#include "infovel/hamming.hpp"
#include "infovel/multibit.hpp"
#include "infovel/onebit.hpp"
#include "infovel/simulator.hpp"
