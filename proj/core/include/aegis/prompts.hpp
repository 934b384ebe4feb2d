#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aegis/gateway.hpp"
#include "aegis/kb.hpp"

namespace aegis {

enum class PromptVersion : int { v1 = 1, v2 = 2, v3 = 3 };

std::string to_string(PromptVersion version);
std::optional<PromptVersion> prompt_version_from_string(const std::string& text);

/// One role at one version: identity prompt, the output-format contract it
/// must emit, and the revise checklist the reflection loop feeds back.
struct RoleSpec {
    std::string role_id;
    std::string system_prompt;
    std::string output_contract;       // contract name; required for stage roles
    std::string revise_instructions;   // empty for researcher/revisor
};

struct RenderedPrompt {
    std::vector<ChatMessage> messages;
    std::string tag;
};

/// Context a stage call renders against. required_upstream lists the role
/// ids the caller's topology guarantees; rendering fails loudly if one is
/// absent rather than silently producing a prompt with a hole in it.
struct PromptContext {
    std::string requirement;
    std::vector<std::pair<std::string, std::string>> upstream;  // (role_id, text), oldest first
    std::vector<std::string> required_upstream;
    std::vector<RetrievalHit> retrieval;
    std::string task_directive;
    std::string tag;
};

/// Loads prompts/<version>/<role>.md files (front matter + body) plus the
/// optional <role>.revise.md companions. Immutable once loaded.
class PromptRegistry {
  public:
    static PromptRegistry load(const std::string& dir);

    bool has_version(PromptVersion version) const;
    bool has_role(PromptVersion version, const std::string& role_id) const;
    const RoleSpec& role(PromptVersion version, const std::string& role_id) const;
    std::vector<std::string> role_ids(PromptVersion version) const;
    std::string revise_instructions_for(const std::string& role_id, PromptVersion version) const;

    /// The fixed user-message template the pipeline entry substitutes the
    /// requirement into.
    static const std::string& entry_template();

  private:
    std::map<PromptVersion, std::map<std::string, RoleSpec>> versions_;
};

/// Substitutes the requirement into the entry template, single pass, braces
/// in the requirement preserved literally. Tag is always "entry".
RenderedPrompt render_entry_prompt(const std::string& requirement_text, PromptVersion version);

/// System message is the role's prompt; user message concatenates sections
/// in fixed order: requirement, upstream outputs oldest first, retrieval
/// excerpts, task directive. fusa_manager at v2+ additionally gets the
/// standing directive to consult the VDA 702 standard in the knowledge base.
RenderedPrompt render_role_prompt(const RoleSpec& role, PromptVersion version,
                                  const PromptContext& context);

}  // namespace aegis
