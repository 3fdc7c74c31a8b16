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

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace coughnet {

struct TrainConfig {
  double initial_lr = 2e-4;
  double lr_factor = 0.75;
  int lr_patience = 2;
  int early_stop_patience = 10;
  int max_epochs = 150;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double min_lr = 0.0;
  bool deterministic = true;

  void validate() const;
};

// Multiplies the rate by lr_factor once lr_patience consecutive epochs fail to
// strictly improve on the best validation loss. The wait counter resets on
// improvement and after each decay.
class PlateauScheduler {
 public:
  explicit PlateauScheduler(const TrainConfig& config);

  // Feeds one epoch's validation loss; returns the rate for the next epoch.
  double update(double val_loss);
  double learning_rate() const { return lr_; }
  int wait() const { return wait_; }

 private:
  double factor_, min_lr_, lr_;
  int patience_;
  int wait_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

// Signals a stop after early_stop_patience consecutive non-improving epochs
// or once max_epochs epochs have run.
class EarlyStopping {
 public:
  explicit EarlyStopping(const TrainConfig& config);

  // Feeds one epoch's validation loss; true when training should stop.
  bool update(double val_loss);
  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }  // 1-based; 0 before any epoch
  double best_loss() const { return best_; }
  int epochs_seen() const { return epoch_; }

 private:
  int patience_, max_epochs_;
  int wait_ = 0, epoch_ = 0, best_epoch_ = 0;
  bool improved_ = false;
  double best_ = std::numeric_limits<double>::infinity();
};

// Rate in effect after each epoch of `history` (element i follows epoch i + 1).
std::vector<double> reduce_lr_on_plateau(std::span<const double> history, const TrainConfig& config);

// 1-based epoch at which training stops, or nullopt if `history` does not trigger a stop.
std::optional<int> early_stop(std::span<const double> history, const TrainConfig& config);

}  // namespace coughnet
