#pragma once

#include <filesystem>
#include <variant>

#include "encergy/gpr.hpp"
#include "encergy/linreg.hpp"

namespace encergy {

// JSON model files carry a model_kind discriminator ("gpr" | "lr"). The
// Cholesky factor is not stored; it is recomputed on load and the model
// invariants are verified, so loading fails loudly on tampered files.
void save_model(const GprModel& model, const std::filesystem::path& path);
void save_model(const LrModel& model, const std::filesystem::path& path);

GprModel load_gpr_model(const std::filesystem::path& path);
LrModel load_lr_model(const std::filesystem::path& path);

std::variant<GprModel, LrModel> load_any_model(const std::filesystem::path& path);

} // namespace encergy
