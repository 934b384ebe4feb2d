#include "aegis/prompts.hpp"

#include <filesystem>
#include <set>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace fs = std::filesystem;

namespace aegis {

namespace {

const std::set<std::string> kKnownRoles = {"fusa_manager", "fusa_expert", "vv_engineer",
                                           "researcher", "revisor"};
const std::set<std::string> kStageRoles = {"fusa_manager", "fusa_expert", "vv_engineer"};

struct FrontMatter {
    std::map<std::string, std::string> fields;
    std::string body;
};

FrontMatter parse_front_matter(const std::string& text, const std::string& path) {
    const auto lines = util::split_lines(text);
    if (lines.empty() || util::trim(lines[0]) != "---") {
        throw ConfigError(path + ": prompt file must start with a --- front matter block");
    }
    FrontMatter fm;
    std::size_t i = 1;
    for (; i < lines.size(); ++i) {
        const std::string line = util::trim(lines[i]);
        if (line == "---") break;
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ConfigError(path + ": front matter line without ':': " + line);
        }
        fm.fields[util::trim(line.substr(0, colon))] = util::trim(line.substr(colon + 1));
    }
    if (i >= lines.size()) {
        throw ConfigError(path + ": unterminated front matter block");
    }
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
        fm.body += lines[j];
        fm.body.push_back('\n');
    }
    fm.body = util::trim(fm.body);
    return fm;
}

std::string front_field(const FrontMatter& fm, const std::string& key, const std::string& path) {
    auto it = fm.fields.find(key);
    if (it == fm.fields.end()) {
        throw ConfigError(path + ": front matter missing key '" + key + "'");
    }
    return it->second;
}

}  // namespace

std::string to_string(PromptVersion version) {
    return "v" + std::to_string(static_cast<int>(version));
}

std::optional<PromptVersion> prompt_version_from_string(const std::string& text) {
    const std::string t = util::trim(util::to_lower(text));
    if (t == "v1" || t == "1") return PromptVersion::v1;
    if (t == "v2" || t == "2") return PromptVersion::v2;
    if (t == "v3" || t == "3") return PromptVersion::v3;
    return std::nullopt;
}

const std::string& PromptRegistry::entry_template() {
    static const std::string kTemplate =
        "Please generate the functional activities with the input requirement {REQUIREMENT}.";
    return kTemplate;
}

PromptRegistry PromptRegistry::load(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw ConfigError("prompt directory does not exist: " + dir);
    }
    PromptRegistry registry;
    for (const auto& version_entry : fs::directory_iterator(dir)) {
        if (!version_entry.is_directory()) continue;
        const std::string version_name = version_entry.path().filename().string();
        const auto version = prompt_version_from_string(version_name);
        if (!version) {
            throw ConfigError("prompt directory has unknown version folder: " + version_name);
        }

        auto& roles = registry.versions_[*version];
        for (const auto& file_entry : fs::directory_iterator(version_entry.path())) {
            const fs::path path = file_entry.path();
            if (path.extension() != ".md") continue;
            std::string stem = path.stem().string();
            const bool is_revise = stem.size() > 7 && stem.ends_with(".revise");
            if (is_revise) stem = stem.substr(0, stem.size() - 7);
            if (!kKnownRoles.count(stem)) {
                throw ConfigError("unknown role prompt file: " + path.string());
            }

            const FrontMatter fm = parse_front_matter(util::read_file(path.string()), path.string());
            if (front_field(fm, "role_id", path.string()) != stem) {
                throw ConfigError(path.string() + ": role_id front matter does not match filename");
            }
            if (front_field(fm, "version", path.string()) != version_name) {
                throw ConfigError(path.string() + ": version front matter does not match folder");
            }
            if (fm.body.empty()) {
                throw ConfigError(path.string() + ": prompt body is empty");
            }

            RoleSpec& spec = roles[stem];
            spec.role_id = stem;
            if (is_revise) {
                spec.revise_instructions = fm.body;
            } else {
                spec.system_prompt = fm.body;
                auto contract = fm.fields.find("output_contract");
                if (contract != fm.fields.end()) spec.output_contract = contract->second;
            }
        }

        for (const auto& [role_id, spec] : roles) {
            if (spec.system_prompt.empty()) {
                throw ConfigError("prompt set " + version_name + " lacks a system prompt for " +
                                  role_id);
            }
            if (kStageRoles.count(role_id)) {
                if (spec.output_contract.empty()) {
                    throw ConfigError("stage role " + role_id + " at " + version_name +
                                      " declares no output contract");
                }
                if (spec.revise_instructions.empty()) {
                    throw ConfigError("stage role " + role_id + " at " + version_name +
                                      " has no revise instructions");
                }
            }
        }
    }
    if (registry.versions_.empty()) {
        throw ConfigError("prompt directory holds no version folders: " + dir);
    }
    return registry;
}

bool PromptRegistry::has_version(PromptVersion version) const {
    return versions_.count(version) > 0;
}

bool PromptRegistry::has_role(PromptVersion version, const std::string& role_id) const {
    auto it = versions_.find(version);
    return it != versions_.end() && it->second.count(role_id) > 0;
}

const RoleSpec& PromptRegistry::role(PromptVersion version, const std::string& role_id) const {
    auto it = versions_.find(version);
    if (it == versions_.end()) {
        throw PromptError("prompt version " + to_string(version) + " is not loaded");
    }
    auto role_it = it->second.find(role_id);
    if (role_it == it->second.end()) {
        throw PromptError("no prompt for role " + role_id + " at " + to_string(version));
    }
    return role_it->second;
}

std::vector<std::string> PromptRegistry::role_ids(PromptVersion version) const {
    std::vector<std::string> ids;
    auto it = versions_.find(version);
    if (it == versions_.end()) return ids;
    for (const auto& [role_id, spec] : it->second) ids.push_back(role_id);
    return ids;
}

std::string PromptRegistry::revise_instructions_for(const std::string& role_id,
                                                    PromptVersion version) const {
    const RoleSpec& spec = role(version, role_id);
    if (spec.revise_instructions.empty()) {
        throw PromptError("role " + role_id + " has no revise instructions at " +
                          to_string(version));
    }
    return spec.revise_instructions;
}

RenderedPrompt render_entry_prompt(const std::string& requirement_text, PromptVersion version) {
    (void)version;  // the entry template is version-independent
    if (util::trim(requirement_text).empty()) {
        throw PromptError("entry prompt requires a non-empty requirement");
    }
    const std::string& tmpl = PromptRegistry::entry_template();
    const std::string placeholder = "{REQUIREMENT}";
    const auto pos = tmpl.find(placeholder);
    std::string user = tmpl;
    user.replace(pos, placeholder.size(), requirement_text);

    RenderedPrompt out;
    out.messages.push_back({ChatRole::user, user});
    out.tag = "entry";
    return out;
}

RenderedPrompt render_role_prompt(const RoleSpec& role, PromptVersion version,
                                  const PromptContext& context) {
    if (util::trim(context.requirement).empty()) {
        throw PromptError("role prompt requires a non-empty requirement");
    }
    for (const auto& required : context.required_upstream) {
        bool present = false;
        for (const auto& [upstream_role, text] : context.upstream) {
            if (upstream_role == required && !util::trim(text).empty()) {
                present = true;
                break;
            }
        }
        if (!present) {
            throw PromptError("missing stage: " + required);
        }
    }

    std::string user;
    user += "# Input Requirement\n\n";
    user += render_entry_prompt(context.requirement, version).messages.front().content;
    user += "\n";

    for (const auto& [upstream_role, text] : context.upstream) {
        user += "\n# Output from " + upstream_role + "\n\n";
        user += util::trim(text);
        user += "\n";
    }

    if (!context.retrieval.empty()) {
        user += "\n# Knowledge Base Excerpts\n";
        for (const auto& hit : context.retrieval) {
            user += "\n[" + hit.chunk.doc_id + " chunk " + std::to_string(hit.chunk.chunk_index) +
                    "]\n";
            user += util::trim(hit.chunk.text);
            user += "\n";
        }
    }

    user += "\n# Task\n\n";
    if (role.role_id == "fusa_manager" && version >= PromptVersion::v2) {
        user += "Refer to the VDA 702 Standard in the knowledge base when classifying "
                "driving situations and exposure ratings.\n";
    }
    if (!util::trim(context.task_directive).empty()) {
        user += util::trim(context.task_directive);
        user += "\n";
    } else {
        user += "Produce your complete output now, following your output format exactly.\n";
    }

    RenderedPrompt out;
    out.messages.push_back({ChatRole::system, role.system_prompt});
    out.messages.push_back({ChatRole::user, user});
    out.tag = context.tag;
    return out;
}

}  // namespace aegis
