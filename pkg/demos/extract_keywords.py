"""
Keywords from a task description
================================

A task description is split into sentences, tokenized, tagged and chunked.
Only verbs and noun phrases survive.
"""

from bpmn_weaver import analyse, extract_keywords

text = "Send a confirmation email to the customer. Then archive the signed contracts."

# every token with its tag and stem
tokens, phrases = analyse(text)
for tok in tokens:
    print(f"{tok.surface:>14}  {tok.tag:<5} {tok.normalized}")

# the keyword set the matcher sees; the memo key joins it in sorted order
k = extract_keywords(text)
print("verbs:       ", sorted(k.verbs))
print("noun phrases:", sorted(k.noun_phrases))
print("head nouns:  ", sorted(k.head_nouns))
print("memo key:    ", k.canonical_key())
