//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_AGFN_HPP_
#define AGFN_AGFN_HPP_

#include "agfn/autodiff.hpp"
#include "agfn/canon.hpp"
#include "agfn/checkpoint.hpp"
#include "agfn/commands.hpp"
#include "agfn/config.hpp"
#include "agfn/descriptors.hpp"
#include "agfn/element.hpp"
#include "agfn/fingerprint.hpp"
#include "agfn/mdp.hpp"
#include "agfn/metrics.hpp"
#include "agfn/molgraph.hpp"
#include "agfn/policy.hpp"
#include "agfn/resonance.hpp"
#include "agfn/reward.hpp"
#include "agfn/rings.hpp"
#include "agfn/sampler.hpp"
#include "agfn/smiles.hpp"
#include "agfn/trainer.hpp"

#endif  // AGFN_AGFN_HPP_
