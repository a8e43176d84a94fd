#ifndef SOUNDZERO_SOUNDZERO_HPP
#define SOUNDZERO_SOUNDZERO_HPP

#include "soundzero/core.hpp"
#include "soundzero/fixtures.hpp"
#include "soundzero/learner.hpp"
#include "soundzero/operators.hpp"
#include "soundzero/problems.hpp"
#include "soundzero/semantics.hpp"
#include "soundzero/table.hpp"
#include "soundzero/trace_io.hpp"

#endif  // SOUNDZERO_SOUNDZERO_HPP
