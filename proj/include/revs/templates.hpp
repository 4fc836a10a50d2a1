#pragma once

#include <string_view>
#include <vector>

namespace revs {

inline constexpr int kTemplateCorpusVersion = 1;

enum class TemplateDomain { employment, tax, finance, government, medical };

const char* to_string(TemplateDomain domain);

struct Template {
    TemplateDomain domain;
    std::string_view text;  // with [NAME], [SSN], [DATE] placeholders
};

/// Fixed in-repo sentence templates, grouped by domain.
const std::vector<Template>& ssn_templates();

const std::vector<std::string_view>& first_names();
const std::vector<std::string_view>& last_names();

}  // namespace revs
