"""Fixed English stopword list, embedded for reproducibility.

A SMART-style general-English list; no corpus-specific additions.  Kept as a
frozen set so membership tests are cheap and the vocabulary of any corpus is
a pure function of its bytes.
"""

_WORDS = """
a about above across after afterwards again against all almost alone along
already also although always am among amongst an and another any anybody
anyhow anyone anything anyway anywhere are around as at be became because
become becomes becoming been before beforehand behind being below beside
besides between beyond both but by can cannot could did do does doing done
down during each either else elsewhere enough etc even ever every everybody
everyone everything everywhere except few for former formerly from further
had has have having he hence her here hereafter hereby herein hereupon hers
herself him himself his how however i ie if in indeed instead into is it its
itself just last latter latterly least less let like likely may me meanwhile
might mine more moreover most mostly much must my myself namely neither
never nevertheless next no nobody none nonetheless noone nor not nothing now
nowhere of off often on once one only onto or other others otherwise our
ours ourselves out over own per perhaps rather re same seem seemed seeming
seems several she should since so some somehow someone something sometime
sometimes somewhere still such than that the their theirs them themselves
then thence there thereafter thereby therefore therein thereupon these they
this those though through throughout thru thus to together too toward
towards under until up upon us very via was we well were what whatever when
whence whenever where whereafter whereas whereby wherein whereupon wherever
whether which while whither who whoever whole whom whose why will with
within without would yet you your yours yourself yourselves
"""

STOPWORDS = frozenset(_WORDS.split())
