#pragma once

// Umbrella header: the full library.

#include "medsynth/errors.hpp"

#include "medsynth/numeric/adam.hpp"
#include "medsynth/numeric/gradient_check.hpp"
#include "medsynth/numeric/layers.hpp"
#include "medsynth/numeric/matrix.hpp"
#include "medsynth/numeric/random.hpp"

#include "medsynth/records/codec.hpp"
#include "medsynth/records/csv.hpp"
#include "medsynth/records/record.hpp"
#include "medsynth/records/schema.hpp"
#include "medsynth/records/toy.hpp"

#include "medsynth/vae/loss.hpp"
#include "medsynth/vae/model.hpp"
#include "medsynth/vae/serialize.hpp"
#include "medsynth/vae/train.hpp"

#include "medsynth/eval/discriminator.hpp"
#include "medsynth/eval/marginals.hpp"
#include "medsynth/eval/pca.hpp"
#include "medsynth/eval/svg.hpp"
