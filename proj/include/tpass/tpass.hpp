#pragma once

#include "tpass/channel.hpp"
#include "tpass/config.hpp"
#include "tpass/error.hpp"
#include "tpass/experiments.hpp"
#include "tpass/montecarlo.hpp"
#include "tpass/multiuser.hpp"
#include "tpass/oracle.hpp"
#include "tpass/params.hpp"
#include "tpass/rates.hpp"
#include "tpass/twouser.hpp"
