#include "gsw/prompts.hpp"

namespace gsw::prompts {

const std::string kCorefSystem =
    "You rewrite narrative chapters so that every pronoun and definite reference "
    "names its referent explicitly. You never add, remove, or reorder sentences, "
    "and you keep every other word unchanged.";

const std::string kCorefUser = R"(Rewrite the chapter below, replacing pronouns and
definite references ("he", "the detective", "the visitor") with the canonical name of
the person, organization, or place they refer to. Keep the sentence count and sentence
order exactly as given. Return only the rewritten chapter text, nothing else.

<chapter doc="{doc_id}">
{chapter_text}
</chapter>)";

const std::string kBackgroundSystem =
    "You write one-sentence orientation notes that situate a passage within its "
    "chapter. Stay under 100 tokens and never introduce facts that are absent "
    "from the chapter.";

const std::string kBackgroundUser = R"(Write a short note (at most 100 tokens) situating
the passage inside its chapter: what has happened so far and where this passage sits in
the narrative. Return only the note.

<chapter doc="{doc_id}">
{chapter_text}
</chapter>
<passage index="{chunk_index}">
{chunk_text}
</passage>)";

const std::string kOperatorSystem = R"(You distill narrative text into a structured semantic
record of actors, their roles and states, the verb events linking them, the locations and
times anchoring those events, and open questions about what may happen next.

Definitions:
- An actor's ROLE names how it is disposed to act ("presenter", "suspect", "organizer").
- A STATE names a condition that constrains those actions ("apprehended", "awarded").
- A VERB EVENT records subject, verb lemma, optional object, and the role/state
  transitions (valences) the event signals for its participants.
- A SPACE-TIME NODE records a location and/or a time phrase exactly as written.
- A FORWARD QUESTION asks about a development the text sets up but does not yet answer.

Output format — four fixed sections in this order, one record per line, fields separated
by single tabs, '-' for an empty field, multiple values joined with '|', then END:

ENTITIES
name<TAB>role|role<TAB>state|state
EVENTS
subject<TAB>verb<TAB>object<TAB>entity:transition|entity:transition
NODES
node_id<TAB>location<TAB>time<TAB>granularity(instant|day|range|unspecified)
QUESTIONS
question_id<TAB>question text<TAB>entity|entity
END

Rules: every event participant must appear under ENTITIES; node ids are n1, n2, ...;
question ids are q1, q2, ...; output the section headers even when a section is empty;
output nothing before ENTITIES or after END.)";

const std::string kOperatorUser = R"(Extract the semantic record for the passage below.
The background note tells you where the passage sits in its chapter; use it to resolve
references, but extract only facts stated in the passage.

<background>
{background_context}
</background>
<chunk doc="{doc_id}" index="{chunk_index}">
{chunk_text}
</chunk>)";

const std::string kSpaceTimeSystem = R"(You bind actors to the locations and times of the
events they participate in. Given a semantic record, decide which entities share each
space-time node: participants of an event anchored at a node must all be coupled to it.
Also flag nodes that describe the same place or the same moment so they can be merged.

Output format — two sections, one record per line, tab-separated fields, then END:

COUPLINGS
entity<TAB>node_id<TAB>short rationale
MERGES
node_id<TAB>node_id
END

Output the headers even when a section is empty. Only reference entities and node ids
that appear in the record.)";

const std::string kSpaceTimeUser = R"(Couple the entities of this record to its space-time
nodes.

<instance doc="{doc_id}" index="{chunk_index}">
{instance}
</instance>)";

const std::string kQuestionReconcileSystem = R"(You check whether open questions from an
evolving narrative memory can now be answered from a newly read passage. Answer a
question only when the passage states the answer; do not guess.

Output format — one section, then END:

RESOLUTIONS
question_id<TAB>answer drawn from the passage
END

List only the questions you can answer. Output the RESOLUTIONS header even when no
question is answerable.)";

const std::string kQuestionReconcileUser = R"(Open questions:
<questions>
{questions}
</questions>

Newly read passage:
<chunk doc="{doc_id}" index="{chunk_index}">
{chunk_text}
</chunk>)";

const std::string kSummarySystem = R"(You recreate one actor's episode from a structured
memory record: who they were, what they did, and exactly where and when. Write flowing
prose in chronological order, keep every date and location from the record verbatim, and
add nothing the record does not state. Stay under 500 tokens.)";

const std::string kSummaryUser = R"(Write the episodic summary for {entity_name} from this
record.

<record doc="{doc_id}" entity="{entity_name}">
{record}
</record>)";

const std::string kQueryNerSystem = R"(You list the retrieval cues in a question: named
people, organizations, locations, event names, and explicit dates. Copy each cue exactly
as written in the question.

Output format:

CUES
one cue per line
END

Output the CUES header even when the question contains none.)";

const std::string kQueryNerUser = R"(<question>
{question}
</question>)";

const std::string kAnswerSystem = R"(You answer questions about past events using only the
episodic summaries provided as context. Each context block names its chapter and actor.
If the context contains no relevant events, state that no such events are recorded.
Answer concisely; when the question asks for a list, give the list and nothing more.)";

const std::string kAnswerUser = R"(<context>
{context}
</context>
<question>
{question}
</question>)";

const std::string kJudgeSystem = R"(You extract the answer items from a model's response to
a question, so the items can be compared with a gold answer set. Return the distinct
items only — no commentary, no duplicates — as a bracketed list:

[item one, item two, item three]

Return [] when the response contains no items.)";

const std::string kJudgeUser = R"(<question>
{question}
</question>
<response>
{answer}
</response>)";

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out(tmpl);
    for (const auto& [name, value] : values) {
        std::string needle = "{" + name + "}";
        std::size_t at = 0;
        while ((at = out.find(needle, at)) != std::string::npos) {
            out.replace(at, needle.size(), value);
            at += value.size();
        }
    }
    return out;
}

std::string extract_tagged(std::string_view prompt, std::string_view tag) {
    std::string open = "<" + std::string(tag);
    std::string close = "</" + std::string(tag) + ">";
    std::size_t start = prompt.find(open);
    if (start == std::string_view::npos) return {};
    std::size_t body = prompt.find('>', start);
    if (body == std::string_view::npos) return {};
    ++body;
    std::size_t end = prompt.find(close, body);
    if (end == std::string_view::npos) return {};
    std::string_view inner = prompt.substr(body, end - body);
    while (!inner.empty() && (inner.front() == '\n' || inner.front() == '\r'))
        inner.remove_prefix(1);
    while (!inner.empty() && (inner.back() == '\n' || inner.back() == '\r'))
        inner.remove_suffix(1);
    return std::string(inner);
}

std::string extract_tag_attribute(std::string_view prompt, std::string_view tag,
                                  std::string_view attribute) {
    std::string open = "<" + std::string(tag);
    std::size_t start = prompt.find(open);
    if (start == std::string_view::npos) return {};
    std::size_t end = prompt.find('>', start);
    if (end == std::string_view::npos) return {};
    std::string_view header = prompt.substr(start, end - start);
    std::string needle = std::string(attribute) + "=\"";
    std::size_t at = header.find(needle);
    if (at == std::string_view::npos) return {};
    at += needle.size();
    std::size_t quote = header.find('"', at);
    if (quote == std::string_view::npos) return {};
    return std::string(header.substr(at, quote - at));
}

} // namespace gsw::prompts
