#pragma once

#include "lfcsafe/attacks.hpp"
#include "lfcsafe/config.hpp"
#include "lfcsafe/dynamics.hpp"
#include "lfcsafe/estimator.hpp"
#include "lfcsafe/expm.hpp"
#include "lfcsafe/plot.hpp"
#include "lfcsafe/relays.hpp"
#include "lfcsafe/scc.hpp"
#include "lfcsafe/scenario.hpp"
#include "lfcsafe/trace_io.hpp"
