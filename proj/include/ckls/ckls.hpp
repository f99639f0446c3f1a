#pragma once

#include "ckls/rational.hpp"
#include "ckls/linalg.hpp"
#include "ckls/dataset.hpp"
#include "ckls/model.hpp"
#include "ckls/koszul.hpp"
#include "ckls/cech.hpp"
#include "ckls/io.hpp"
