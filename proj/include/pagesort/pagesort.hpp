#pragma once

#include "pagesort/class_label.hpp"
#include "pagesort/corpus.hpp"
#include "pagesort/error.hpp"
#include "pagesort/evaluation.hpp"
#include "pagesort/features.hpp"
#include "pagesort/html.hpp"
#include "pagesort/lexicon.hpp"
#include "pagesort/mlp.hpp"
#include "pagesort/model_io.hpp"
#include "pagesort/pipeline.hpp"
#include "pagesort/random.hpp"
#include "pagesort/url.hpp"
