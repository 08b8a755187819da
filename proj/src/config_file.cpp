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

#include "hucya/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hucya
{
    std::string trim(const std::string &s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::vector<std::string> split(const std::string &s, char sep)
    {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, sep))
            out.push_back(trim(cur));
        if (!s.empty() && s.back() == sep)
            out.emplace_back();
        return out;
    }

    double parse_double(const std::string &text, const std::string &what)
    {
        const std::string t = trim(text);
        std::string lower(t);
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return char(std::tolower(c)); });
        if (lower == "inf" || lower == "+inf")
            return std::numeric_limits<double>::infinity();
        if (lower == "-inf")
            return -std::numeric_limits<double>::infinity();
        double v = 0.0;
        const auto *b = t.data(), *e = t.data() + t.size();
        const auto r = std::from_chars(b, e, v);
        if (t.empty() || r.ec != std::errc() || r.ptr != e || std::isnan(v))
            throw config_error(what + ": '" + text + "' is not a number");
        return v;
    }

    void ConfigSection::add(ConfigEntry e)
    {
        if (find(e.key))
            throw config_error("line " + std::to_string(e.line) + ": duplicate key '" + e.key + "' in [" + name_ + "]");
        entries_.push_back(std::move(e));
        used_.push_back(false);
    }

    const ConfigEntry *ConfigSection::find(const std::string &key) const
    {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].key == key)
            {
                used_[i] = true;
                return &entries_[i];
            }
        return nullptr;
    }

    bool ConfigSection::has(const std::string &key) const { return find(key) != nullptr; }

    std::string ConfigSection::get_string(const std::string &key, const std::string &fallback) const
    {
        const auto *e = find(key);
        return e ? e->value : fallback;
    }

    double ConfigSection::get_double(const std::string &key, double fallback) const
    {
        const auto *e = find(key);
        return e ? parse_double(e->value, "line " + std::to_string(e->line) + " [" + name_ + "] " + key) : fallback;
    }

    std::uint64_t ConfigSection::get_u64(const std::string &key, std::uint64_t fallback) const
    {
        const auto *e = find(key);
        if (!e)
            return fallback;
        std::uint64_t v = 0;
        const std::string t = trim(e->value);
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
            throw config_error("line " + std::to_string(e->line) + " [" + name_ + "] " + key + ": '" + e->value +
                               "' is not a non-negative integer");
        return v;
    }

    std::size_t ConfigSection::get_count(const std::string &key, std::size_t fallback) const
    {
        return static_cast<std::size_t>(get_u64(key, fallback));
    }

    bool ConfigSection::get_bool(const std::string &key, bool fallback) const
    {
        const auto *e = find(key);
        if (!e)
            return fallback;
        const std::string v = trim(e->value);
        if (v == "true" || v == "1" || v == "yes" || v == "on")
            return true;
        if (v == "false" || v == "0" || v == "no" || v == "off")
            return false;
        throw config_error("line " + std::to_string(e->line) + " [" + name_ + "] " + key + ": '" + v + "' is not a boolean");
    }

    std::vector<std::string> ConfigSection::get_list(const std::string &key) const
    {
        const auto *e = find(key);
        if (!e)
            return {};
        auto parts = split(e->value, ',');
        for (const auto &p : parts)
            if (p.empty())
                throw config_error("line " + std::to_string(e->line) + " [" + name_ + "] " + key + ": empty list element");
        return parts;
    }

    std::vector<double> ConfigSection::get_doubles(const std::string &key) const
    {
        std::vector<double> out;
        const auto *e = find(key);
        for (const auto &p : get_list(key))
            out.push_back(parse_double(p, "line " + std::to_string(e->line) + " [" + name_ + "] " + key));
        return out;
    }

    void ConfigSection::reject_unknown() const
    {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (!used_[i])
                throw config_error("line " + std::to_string(entries_[i].line) + ": unknown key '" + entries_[i].key +
                                   "' in [" + name_ + "]");
    }

    ConfigDocument ConfigDocument::parse(const std::string &text, const std::string &origin)
    {
        ConfigDocument doc;
        doc.origin_ = origin;
        std::istringstream in(text);
        std::string raw;
        std::size_t line = 0;
        while (std::getline(in, raw))
        {
            ++line;
            const auto hash = raw.find('#');
            const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (s.empty())
                continue;
            if (s.front() == '[')
            {
                if (s.back() != ']' || s.size() < 3)
                    throw config_error(origin + ":" + std::to_string(line) + ": malformed section header");
                doc.sections_.emplace_back(trim(s.substr(1, s.size() - 2)), line);
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(line) + ": expected key = value");
            if (doc.sections_.empty())
                throw config_error(origin + ":" + std::to_string(line) + ": key outside any section");
            ConfigEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
            if (e.key.empty())
                throw config_error(origin + ":" + std::to_string(line) + ": empty key");
            doc.sections_.back().add(std::move(e));
        }
        return doc;
    }

    ConfigDocument ConfigDocument::load(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw config_error("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    std::vector<const ConfigSection *> ConfigDocument::all(const std::string &name) const
    {
        std::vector<const ConfigSection *> out;
        for (const auto &s : sections_)
            if (s.name() == name)
                out.push_back(&s);
        return out;
    }

    const ConfigSection *ConfigDocument::first(const std::string &name) const
    {
        const auto v = all(name);
        if (v.size() > 1)
            throw config_error("section [" + name + "] may appear only once (line " + std::to_string(v[1]->line()) + ")");
        return v.empty() ? nullptr : v.front();
    }
}
