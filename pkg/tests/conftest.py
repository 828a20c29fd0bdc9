import logging

import pytest

from chunklab.corpus import parse_conll

# Keep ingest-normalization warnings out of test output; tests that care
# about the warnings use caplog explicitly.
logging.getLogger("chunklab").setLevel(logging.ERROR)


# One rule writer's full list, with comments and continuation lines; the
# golden parse target for the rule language.
RULE_LIST = r"""# Grab-all rule
{ _RB::? ADJ* ANOUN* ADJ* ANOUN+ }
# (blah blah last Fri)->(blah blah) (last Fri)
{ [ ANYTHING* } { _JJ TIME_W ] }
{ [ NOT_ADJ+ } { TIME_W ] }
# about $8 (an ounce) -> (about $8 an ounce)
{ (Only|only|About|about)_::? _(\$|#)::?  \
   _CD::+ [ ANYTHING+ ] }
{ _RBR::* _(PDT|JJ)::? _(DT|PRP\$|POS) ADJ* \
   _RB::? VERB? [ ANYTHING+ ] }
# ( boy ) -> ( that boy )
[ (That|that)__DT { ANYTHING+ } ]
# ( about 4 1/2 )
{ (only|about)_::? (\$|#)_::? _CD::+ }
{ [ ANYTHING+ [? ANYTHING* ]? ] _-LRB-  \
   [ ANYTHING+ ]  _-RRB- [ ANYTHING+ ] }
# Pronouns are usually baseNPs
{ _DT::? _PRP }
# ``and'' usually isn't in a baseNP
{ [ _\S+::+ ] (and|&)_ [ _\S+::+ ] }
# more singleton baseNPs
{ _(DT|EX|WP|WDT) } VERB
# some numbers are singleton baseNPs
{ [ ANYTHING ] [ _CD ] }
# ( much/most ) of
{ _(DT|RB)::? (much|most)_ } _IN
"""

# The three reference transformations: (rule, before, after).
GOLDEN_TRANSFORMS = [
    ("{ _DT ADJ* NOUN+ }",
     "The_DT man_NN ran_VBD ._.",
     "( The_DT man_NN ) ran_VBD ._."),
    ("[ { ANYWORD* NOUN+ } { ADJ* TIMEDAY } ]",
     "( New_NNP York_NNP Friday_NNP )",
     "( New_NNP York_NNP ) ( Friday_NNP )"),
    ("{ about_ [ _$ NUM+ ] }",
     "about_IN ( $_$ 5_CD )",
     "( about_IN $_$ 5_CD )"),
]

# Five tiny sentences where every NN directly after VBZ lies outside a chunk
# while the baseline says inside, plus one breaker sentence ("takes it in")
# that penalizes the chunk-tag-context competitors; exhaustive enumeration
# makes {pos(0)=NN, pos(-1)=VBZ}: I->O the unique best first rule.
PLANTED_TOY = """\
he PRP I
sees VBZ O
dog NN O
in IN O
the DT I
house NN I

she PRP I
takes VBZ O
cat NN O
. . O

the DT I
man NN I
sees VBZ O
car NN O
in IN O
the DT I
market NN I

he PRP I
sees VBZ O
the DT I
dog NN I
. . O

she PRP I
takes VBZ O
rate NN O
. . O

she PRP I
takes VBZ O
it PRP I
in IN O
. . O
"""


@pytest.fixture(scope="session")
def planted_toy():
    return parse_conll(PLANTED_TOY)


@pytest.fixture(scope="session")
def rule_list_text():
    return RULE_LIST
