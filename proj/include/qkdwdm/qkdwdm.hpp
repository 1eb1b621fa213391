#pragma once

#include "qkdwdm/channel_plan.hpp"
#include "qkdwdm/classical10g.hpp"
#include "qkdwdm/detection.hpp"
#include "qkdwdm/filterchain.hpp"
#include "qkdwdm/keyrate.hpp"
#include "qkdwdm/linkmodel.hpp"
#include "qkdwdm/planner.hpp"
#include "qkdwdm/raman.hpp"

#include "qkdwdm/harness/calibrate.hpp"
#include "qkdwdm/harness/emit.hpp"
#include "qkdwdm/harness/evaluate.hpp"
#include "qkdwdm/harness/plan_report.hpp"
#include "qkdwdm/harness/scenario.hpp"
#include "qkdwdm/harness/sweep.hpp"
