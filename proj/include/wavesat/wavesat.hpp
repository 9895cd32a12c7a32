#pragma once

#include "wavesat/error.hpp"
#include "wavesat/filters.hpp"
#include "wavesat/cascade.hpp"
#include "wavesat/analysis.hpp"
#include "wavesat/dyadic.hpp"
#include "wavesat/periodized.hpp"
#include "wavesat/sequence.hpp"
#include "wavesat/verify.hpp"
#include "wavesat/io.hpp"
#include "wavesat/cli.hpp"
