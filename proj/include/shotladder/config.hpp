#pragma once

#include <iosfwd>
#include <string>

#include "shotladder/dataset.hpp"
#include "shotladder/ladders.hpp"
#include "shotladder/texture.hpp"
#include "shotladder/trees.hpp"
#include "shotladder/vif.hpp"

namespace shotladder {

// All experiment constants in one place; nothing below is hard-coded in
// the pipeline logic. The on-disk form is a small TOML subset: sections,
// key = value, numbers, strings, booleans and flat arrays.
struct Config {
    GridConfig grid;
    LadderConfig ladder; // resolutions mirror grid.resolutions
    VifConfig vif;
    LlfConfig llf;
    TreesParams trees;
    SynthConfig synth;
};

Config default_config();

Config load_config(std::istream& in);
Config load_config_file(const std::string& path);
std::string config_to_toml(const Config& config);

// Hash of the canonical TOML emission; stamped into feature files so
// extracted vectors are traceable to their extraction settings.
uint64_t config_hash(const Config& config);

Resolution parse_resolution(const std::string& text); // "3840x2160"

} // namespace shotladder
