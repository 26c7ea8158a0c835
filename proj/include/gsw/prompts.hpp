#pragma once

#include <map>
#include <string>
#include <string_view>

namespace gsw::prompts {

// Prompt templates for every provider-backed stage. Placeholders are written
// {name} and filled by render(). Input payloads travel between XML-style
// delimiters so downstream tooling can recover them unambiguously.

extern const std::string kCorefSystem;
extern const std::string kCorefUser;

extern const std::string kBackgroundSystem;
extern const std::string kBackgroundUser;

extern const std::string kOperatorSystem;
extern const std::string kOperatorUser;

extern const std::string kSpaceTimeSystem;
extern const std::string kSpaceTimeUser;

extern const std::string kQuestionReconcileSystem;
extern const std::string kQuestionReconcileUser;

extern const std::string kSummarySystem;
extern const std::string kSummaryUser;

extern const std::string kQueryNerSystem;
extern const std::string kQueryNerUser;

extern const std::string kAnswerSystem;
extern const std::string kAnswerUser;

extern const std::string kJudgeSystem;
extern const std::string kJudgeUser;

/// Fill {name} placeholders. Unknown placeholders are left intact; unused
/// values are ignored.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Extract the payload between <tag ...> and </tag>, or empty when absent.
std::string extract_tagged(std::string_view prompt, std::string_view tag);

/// Extract an attribute written as name="value" inside the opening <tag ...>.
std::string extract_tag_attribute(std::string_view prompt, std::string_view tag,
                                  std::string_view attribute);

} // namespace gsw::prompts
