#include "pcm/textpipe.hpp"

// Shipped normalization word lists. Content is versioned: the pipeline ids
// embed a hash of these exact bytes, so edits here change every report's
// provenance fingerprint. Raw literals hold one entry per line.

namespace pcm {

namespace {

const char* kStopwordsRaw = R"pcm_list(i
me
my
myself
we
our
ours
ourselves
you
you're
you've
you'll
you'd
your
yours
yourself
yourselves
he
him
his
himself
she
she's
her
hers
herself
it
it's
its
itself
they
them
their
theirs
themselves
what
which
who
whom
this
that
that'll
these
those
am
is
are
was
were
be
been
being
have
has
had
having
do
does
did
doing
a
an
the
and
but
if
or
because
as
until
while
of
at
by
for
with
about
against
between
into
through
during
before
after
above
below
to
from
up
down
in
out
on
off
over
under
again
further
then
once
here
there
when
where
why
how
all
any
both
each
few
more
most
other
some
such
no
nor
not
only
own
same
so
than
too
very
s
t
can
will
just
don
don't
should
should've
now
d
ll
m
o
re
ve
y
ain
aren
aren't
couldn
couldn't
didn
didn't
doesn
doesn't
hadn
hadn't
hasn
hasn't
haven
haven't
isn
isn't
ma
mightn
mightn't
mustn
mustn't
needn
needn't
shan
shan't
shouldn
shouldn't
wasn
wasn't
weren
weren't
won
won't
wouldn
wouldn't
)pcm_list";

const char* kLemmasRaw = R"pcm_list(ate→eat
based→base
became→become
began→begin
begun→begin
believed→believe
believing→believe
best→good
better→good
bought→buy
brought→bring
built→build
came→come
cared→care
caring→care
caught→catch
caused→cause
causing→cause
changed→change
changing→change
children→child
chose→choose
chosen→choose
choosing→choose
coming→come
created→create
creating→create
dated→date
dating→date
done→do
drawn→draw
drew→draw
driven→drive
drove→drive
dying→die
eaten→eat
faced→face
fallen→fall
feet→foot
fell→fall
felt→feel
forced→force
found→find
gave→give
geese→goose
given→give
giving→give
goes→go
gone→go
gotten→get
grew→grow
grown→grow
hated→hate
hating→hate
heard→hear
held→hold
hidden→hide
hiding→hide
hoped→hope
hoping→hope
judging→judge
kept→keep
knew→know
known→know
leaving→leave
left→leave
liked→like
liking→like
lived→live
living→live
losing→lose
lost→lose
loved→love
loving→love
lying→lie
made→make
making→make
managing→manage
meant→mean
men→man
mice→mouse
moved→move
moving→move
named→name
noted→note
noticing→notice
paid→pay
raised→raise
raising→raise
ran→run
rated→rate
rating→rate
ridden→ride
riding→ride
risen→rise
rose→rise
ruled→rule
ruling→rule
said→say
sat→sit
saved→save
saving→save
saw→see
scared→scare
scaring→scare
seen→see
sent→send
served→serve
serving→serve
shaking→shake
shared→share
sharing→share
showed→show
shown→show
smiled→smile
smiling→smile
sold→sell
spent→spend
spoke→speak
spoken→speak
stood→stand
struggling→struggle
taken→take
taking→take
taught→teach
teeth→tooth
thought→think
threw→throw
thrown→throw
told→tell
took→take
traded→trade
trading→trade
tying→tie
typing→type
understood→understand
updated→update
updating→update
used→use
using→use
voted→vote
voting→vote
wasted→waste
wasting→waste
went→go
women→woman
wore→wear
worn→wear
worse→bad
worst→bad
written→write
writing→write
wrote→write
)pcm_list";

}  // namespace

const std::string& builtin_stopwords_text() {
  static const std::string text(kStopwordsRaw);
  return text;
}

const std::string& builtin_lemmas_text() {
  static const std::string text(kLemmasRaw);
  return text;
}

}  // namespace pcm
