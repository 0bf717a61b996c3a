#include "nerforge/mapping.hpp"

#include <fstream>
#include <stdexcept>

#include "nerforge/text_util.hpp"

namespace nerforge {

UnerTag UnerTag::parse(std::string_view rendered) {
    if (rendered.empty() || rendered.front() == '-' || rendered.back() == '-') {
        throw std::invalid_argument("malformed UNER tag: '" + std::string(rendered) + "'");
    }
    bool prev_dash = false;
    for (const char c : rendered) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("UNER tag contains whitespace: '" +
                                        std::string(rendered) + "'");
        }
        if (c == '-' && prev_dash) {
            throw std::invalid_argument("empty UNER tag segment: '" + std::string(rendered) + "'");
        }
        prev_dash = c == '-';
    }
    return UnerTag(std::string(rendered));
}

std::string_view UnerTag::category() const {
    const size_t dash = rendered_.find('-');
    return std::string_view(rendered_).substr(0, dash);
}

void MappingGapLog::record(const std::string& class_iri) {
    std::lock_guard lock(mu_);
    seen_.insert(class_iri);
}

std::vector<std::string> MappingGapLog::gaps() const {
    std::lock_guard lock(mu_);
    return {seen_.begin(), seen_.end()};
}

namespace {

// Shared TSV walk: yields (line_number, key, value) for data rows.
template <typename Fn>
void for_each_tsv_row(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mapping file: " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected <class><TAB><value>");
        }
        fn(lineno, trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
    }
}

}  // namespace

PriorityTable load_priority_table(const std::string& path) {
    PriorityTable table;
    for_each_tsv_row(path, [&](size_t lineno, const std::string& key, const std::string& value) {
        if (key.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty class");
        }
        int priority = 0;
        try {
            priority = std::stoi(value);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": priority is not an integer: '" + value + "'");
        }
        if (priority < 1) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": priority must be >= 1");
        }
        if (!table.entries.emplace(key, priority).second) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": duplicate class '" + key + "'");
        }
    });
    return table;
}

UnerMapping load_uner_mapping(const std::string& path) {
    UnerMapping mapping;
    for_each_tsv_row(path, [&](size_t lineno, const std::string& key, const std::string& value) {
        if (key.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty class");
        }
        std::optional<UnerTag> tag;
        if (value != "NULL") {
            try {
                tag = UnerTag::parse(value);
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
        if (!mapping.entries.emplace(key, std::move(tag)).second) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": duplicate class '" + key + "'");
        }
    });
    return mapping;
}

void validate_tables(const PriorityTable& priorities, const UnerMapping& mapping) {
    const auto thing = priorities.entries.find("owl:Thing");
    if (thing == priorities.entries.end() || thing->second != 1) {
        throw std::runtime_error("priority table must contain owl:Thing with priority 1");
    }
    for (const auto& [class_iri, priority] : priorities.entries) {
        if (!mapping.entries.count(class_iri)) {
            throw std::runtime_error("class '" + class_iri +
                                     "' has a priority but no UNER mapping entry");
        }
    }
}

std::optional<std::string> resolve_class(const std::vector<std::string>& classes,
                                         const PriorityTable& priorities) {
    int best_priority = 0;
    const std::string* best = nullptr;
    for (const std::string& c : classes) {
        const int p = priorities.priority_of(c);
        if (p > best_priority) {  // strict: equal maxima keep the earlier class
            best_priority = p;
            best = &c;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

std::optional<UnerTag> map_to_uner(const std::string& class_iri, const UnerMapping& mapping,
                                   MappingGapLog* gaps) {
    const auto it = mapping.entries.find(class_iri);
    if (it == mapping.entries.end()) {
        if (gaps) gaps->record(class_iri);
        return std::nullopt;
    }
    return it->second;
}

std::optional<UnerTag> tag_entity(const std::vector<std::string>& classes,
                                  const PriorityTable& priorities, const UnerMapping& mapping,
                                  MappingGapLog* gaps) {
    const auto chosen = resolve_class(classes, priorities);
    if (!chosen) return std::nullopt;
    return map_to_uner(*chosen, mapping, gaps);
}

}  // namespace nerforge
