// SPDX-License-Identifier: Apache-2.0
//
// hucya: wideband channel-parameter estimation for hybrid cylindrical arrays
// Copyright (C) 2026 The hucya authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HUCYA_CONFIG_FILE_HPP
#define HUCYA_CONFIG_FILE_HPP

// Flat key = value text with [section] headers and '#' comments. Sections may repeat.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hucya
{
    class config_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct ConfigEntry
    {
        std::string key, value;
        std::size_t line = 0;
    };

    class ConfigSection
    {
    public:
        ConfigSection(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

        const std::string &name() const { return name_; }
        std::size_t line() const { return line_; }
        const std::vector<ConfigEntry> &entries() const { return entries_; }
        void add(ConfigEntry e); // throws config_error on a duplicate key

        bool has(const std::string &key) const;
        const ConfigEntry *find(const std::string &key) const;

        // Typed accessors; each marks the key as consumed and throws config_error on malformed values
        std::string get_string(const std::string &key, const std::string &fallback) const;
        double get_double(const std::string &key, double fallback) const;
        std::size_t get_count(const std::string &key, std::size_t fallback) const;
        std::uint64_t get_u64(const std::string &key, std::uint64_t fallback) const;
        bool get_bool(const std::string &key, bool fallback) const;
        std::vector<double> get_doubles(const std::string &key) const; // comma separated, empty if absent
        std::vector<std::string> get_list(const std::string &key) const;

        // Throws config_error naming the first key no accessor asked for
        void reject_unknown() const;

    private:
        std::string name_;
        std::size_t line_;
        std::vector<ConfigEntry> entries_;
        mutable std::vector<bool> used_;
    };

    class ConfigDocument
    {
    public:
        static ConfigDocument parse(const std::string &text, const std::string &origin = "<string>");
        static ConfigDocument load(const std::string &path);

        const std::vector<ConfigSection> &sections() const { return sections_; }
        std::vector<const ConfigSection *> all(const std::string &name) const;
        const ConfigSection *first(const std::string &name) const; // nullptr when absent; throws if repeated
        const std::string &origin() const { return origin_; }

    private:
        std::vector<ConfigSection> sections_;
        std::string origin_;
    };

    double parse_double(const std::string &text, const std::string &what);
    std::string trim(const std::string &s);
    std::vector<std::string> split(const std::string &s, char sep);
}

#endif
