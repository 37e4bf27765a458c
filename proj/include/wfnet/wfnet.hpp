#pragma once

#include "wfnet/errors.hpp"
#include "wfnet/petri_net.hpp"
#include "wfnet/reachability.hpp"
#include "wfnet/workflow.hpp"
#include "wfnet/labeled.hpp"
#include "wfnet/compose.hpp"
#include "wfnet/morphism.hpp"
#include "wfnet/unfolding.hpp"
#include "wfnet/alpha.hpp"
#include "wfnet/isomorphism.hpp"
#include "wfnet/refine.hpp"
#include "wfnet/io.hpp"
