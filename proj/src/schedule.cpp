// Copyright 2026 The CoughNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coughnet/schedule.h"

#include <algorithm>

#include "coughnet/error.h"

namespace coughnet {

void TrainConfig::validate() const {
  if (!(initial_lr > 0)) throw InvalidArgument("train: initial_lr must be positive");
  if (!(lr_factor > 0 && lr_factor < 1)) throw InvalidArgument("train: lr_factor must be in (0, 1)");
  if (lr_patience < 1 || early_stop_patience < 1) throw InvalidArgument("train: patience values must be >= 1");
  if (max_epochs < 0) throw InvalidArgument("train: max_epochs must be >= 0");
  if (batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (!(min_lr >= 0)) throw InvalidArgument("train: min_lr must be >= 0");
}

PlateauScheduler::PlateauScheduler(const TrainConfig& config)
    : factor_(config.lr_factor), min_lr_(config.min_lr), lr_(config.initial_lr), patience_(config.lr_patience) {}

double PlateauScheduler::update(double val_loss) {
  if (val_loss < best_) {
    best_ = val_loss;
    wait_ = 0;
  } else if (++wait_ >= patience_) {
    lr_ = std::max(lr_ * factor_, min_lr_);
    wait_ = 0;
  }
  return lr_;
}

EarlyStopping::EarlyStopping(const TrainConfig& config)
    : patience_(config.early_stop_patience), max_epochs_(config.max_epochs) {}

bool EarlyStopping::update(double val_loss) {
  ++epoch_;
  improved_ = val_loss < best_;
  if (improved_) {
    best_ = val_loss;
    best_epoch_ = epoch_;
    wait_ = 0;
  } else {
    ++wait_;
  }
  return wait_ >= patience_ || epoch_ >= max_epochs_;
}

std::vector<double> reduce_lr_on_plateau(std::span<const double> history, const TrainConfig& config) {
  PlateauScheduler scheduler(config);
  std::vector<double> out;
  out.reserve(history.size());
  for (const double loss : history) out.push_back(scheduler.update(loss));
  return out;
}

std::optional<int> early_stop(std::span<const double> history, const TrainConfig& config) {
  EarlyStopping stopper(config);
  for (const double loss : history) {
    if (stopper.update(loss)) return stopper.epochs_seen();
  }
  return std::nullopt;
}

}  // namespace coughnet
