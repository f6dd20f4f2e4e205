#pragma once

#include "kdep/error.hpp"
#include "kdep/report.hpp"
#include "kdep/semiring.hpp"
#include "kdep/kteam.hpp"
#include "kdep/atoms.hpp"
#include "kdep/semantics.hpp"
#include "kdep/axioms.hpp"
#include "kdep/cycles.hpp"
#include "kdep/closure.hpp"
#include "kdep/inference.hpp"
#include "kdep/oracle.hpp"
#include "kdep/construct.hpp"
