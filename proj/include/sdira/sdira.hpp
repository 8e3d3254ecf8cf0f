#pragma once

#include "sdira/behaviours.hpp"
#include "sdira/certification.hpp"
#include "sdira/eat.hpp"
#include "sdira/errors.hpp"
#include "sdira/extractor.hpp"
#include "sdira/lp.hpp"
#include "sdira/nelder_mead.hpp"
#include "sdira/quantum.hpp"
#include "sdira/rng.hpp"
#include "sdira/simulation.hpp"
