#pragma once

#include "gossiplab/bounds.hpp"
#include "gossiplab/digraph.hpp"
#include "gossiplab/dyadic.hpp"
#include "gossiplab/ensemble.hpp"
#include "gossiplab/errors.hpp"
#include "gossiplab/matrix_lab.hpp"
#include "gossiplab/random.hpp"
#include "gossiplab/sampling.hpp"
#include "gossiplab/schedule.hpp"
#include "gossiplab/selection.hpp"
#include "gossiplab/simulation.hpp"
#include "gossiplab/verification.hpp"
#include "gossiplab/config.hpp"
#include "gossiplab/report.hpp"
#include "gossiplab/commands.hpp"
