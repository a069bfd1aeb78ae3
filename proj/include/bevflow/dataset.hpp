#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bevflow/assoc.hpp"
#include "bevflow/labels.hpp"
#include "bevflow/perturb.hpp"

namespace bevflow {

/// Directory layouts. Each directory carries a manifest.json describing the
/// grid, frame layout and provenance; grids live in one BGRD file per modality
/// per stored frame (seg_000.bgrd, inst_000.bgrd, centerness_000.bgrd,
/// offset_000.bgrd, fwd_000.bgrd, back_000.bgrd, ...). Stored frame 000 is the
/// reference frame; instance directories hold prediction frames only.
void write_labels_dir(const LabelSet& labels, const std::filesystem::path& dir,
                      std::uint64_t scenario_seed);
LabelSet read_labels_dir(const std::filesystem::path& dir);

void write_predictions_dir(const PredictionSet& pred, const NoiseConfig& noise,
                           const std::filesystem::path& dir);
PredictionSet read_predictions_dir(const std::filesystem::path& dir);

void write_instances_dir(const std::vector<InstanceGrid>& inst, const TimingReport& timing,
                         AssocMode mode, const GridSpec& spec,
                         const std::filesystem::path& dir);
std::vector<InstanceGrid> read_instances_dir(const std::filesystem::path& dir);

}  // namespace bevflow
