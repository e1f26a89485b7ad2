#pragma once

#include "sleeptda/archive.hpp"
#include "sleeptda/cohort/io.hpp"
#include "sleeptda/cohort/study.hpp"
#include "sleeptda/cohort/synthetic.hpp"
#include "sleeptda/config.hpp"
#include "sleeptda/dsp/bands.hpp"
#include "sleeptda/dsp/butterworth.hpp"
#include "sleeptda/dsp/epochs.hpp"
#include "sleeptda/dsp/spectral.hpp"
#include "sleeptda/error.hpp"
#include "sleeptda/inference.hpp"
#include "sleeptda/landscape.hpp"
#include "sleeptda/matrix.hpp"
#include "sleeptda/persistence/brute_force.hpp"
#include "sleeptda/persistence/diagram.hpp"
#include "sleeptda/persistence/metric.hpp"
#include "sleeptda/persistence/rips.hpp"
#include "sleeptda/pipeline.hpp"
#include "sleeptda/plot.hpp"
#include "sleeptda/signal.hpp"
#include "sleeptda/types.hpp"
