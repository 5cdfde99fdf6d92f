#pragma once

#include "mqka/adversary.hpp"
#include "mqka/attack.hpp"
#include "mqka/auth.hpp"
#include "mqka/bits.hpp"
#include "mqka/cli.hpp"
#include "mqka/errors.hpp"
#include "mqka/protocol.hpp"
#include "mqka/qstate.hpp"
#include "mqka/report.hpp"
#include "mqka/rng.hpp"
#include "mqka/scenario.hpp"
#include "mqka/simulation.hpp"
#include "mqka/worked_example.hpp"
