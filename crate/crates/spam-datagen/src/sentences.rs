//! The fixed 200-sentence transcript pool for corpus generation.
//!
//! Phoneme lengths span 2 to 39 and cover every integer count in
//! [2, 33], so a compatible transcript exists for any sampled
//! speaking rate and the [1, 3] second duration window.

/// Transcripts over the toy alphabet (lowercase letters, digits,
/// space, apostrophe).
pub const SENTENCES: [&str; 200] = [
    "go",
    "no",
    "so",
    "run",
    "we go",
    "oh no",
    "i see",
    "to do",
    "be low",
    "say it",
    "we know",
    "go home",
    "it is me",
    "see the sea",
    "a dog ran",
    "the sun set",
    "we like tea",
    "he can sing",
    "nine red hens",
    "the cat sat",
    "a bird flew by",
    "she sells shells",
    "the moon is high",
    "we took the road",
    "time flows slowly",
    "the rain fell hard",
    "dogs bark at night",
    "a fox hid in the log",
    "the kids play outside",
    "she reads a good book",
    "my boat floats on water",
    "the train leaves at nine",
    "birds sing in the spring",
    "he wrote a long letter",
    "the old clock keeps time",
    "we walked along the shore",
    "the coffee smells so good",
    "a cool wind blew from the sea",
    "the garden grows green beans",
    "the river bends near the mill",
    "children laugh at the funny clown",
    "the baker made fresh bread today",
    "a quiet voice carries in the hall",
    "the winter snow covered the field",
    "my brother builds model planes",
    "the teacher reads to the class",
    "we planted 3 trees by the gate",
    "the market opens at 8 in the morning",
    "a small boat sailed under the bridge",
    "the singer held the final note",
    "thunder rolled over the dark hills",
    "the farmer feeds the hens at dawn",
    "she painted the fence a pale blue",
    "the letter arrived 2 days late",
    "we heard an owl call in the night",
    "the bus stops near the old church",
    "a rabbit hopped across the lawn",
    "the chef cooked a rich stew",
    "the stars shine over the quiet town",
    "he fixed the wheel with a new bolt",
    "the song played on the radio",
    "my friend moved to a new city",
    "the leaves turn gold in the fall",
    "a spider spun a web in the shed",
    "the clock struck 12 at midnight",
    "she poured the milk into the glass",
    "the dog chased the ball down the hill",
    "we watched the waves crash on the rocks",
    "the pilot flew over the mountains",
    "a gentle breeze moved the curtains",
    "the students wrote their names",
    "the store sells fruit and bread",
    "he carried the box up the stairs",
    "the phone rang 4 times before she answered",
    "the moonlight fell on the silent lake",
    "a young girl sang a sweet song",
    "the keys were left on the kitchen table",
    "the wind howled through the tall pines",
    "we gathered wood for the fire",
    "the artist drew a picture of the bay",
    "the mail comes at 10 each day",
    "she wears a red scarf in winter",
    "the team won the game last night",
    "a truck rumbled down the gravel road",
    "the candle burned low in the window",
    "he planted roses along the path",
    "the children built a fort of snow",
    "the tide rose under the full moon",
    "a crow sat on the fence post",
    "the soup simmered on the stove",
    "she knits warm socks for her family",
    "the library closes at 6 on fridays",
    "the horse trotted around the field",
    "a light rain fell on the tin roof",
    "the baby slept through the storm",
    "we drove 5 miles to the lake",
    "the bell rang across the valley",
    "the old man told stories by the fire",
    "she swims in the pool each morning",
    "the plane landed right on time",
    "a cat napped in the warm sun",
    "the workers paved the new road",
    "the kettle whistled in the kitchen",
    "he sharpened the axe on the stone",
    "the geese flew south for the winter",
    "she folded the clean towels",
    "the movie starts at 7 tonight",
    "a deer stood still in the clearing",
    "the boys raced their bikes downhill",
    "the flowers bloom in early may",
    "he tuned the guitar before the show",
    "the ship sailed into the harbor",
    "a bee buzzed around the hive",
    "the snow melted in the spring sun",
    "she sliced the warm bread",
    "the lamp glowed in the dark room",
    "we camped beside the rushing stream",
    "the judge read the final verdict",
    "a frog jumped into the pond",
    "the miller ground the wheat to flour",
    "the coach praised the young players",
    "she hums a tune while she works",
    "the fog lifted from the valley floor",
    "a key turned in the rusty lock",
    "the crowd cheered for the home team",
    "he stacked the hay in the barn",
    "the river froze solid in january",
    "she waters the plants every day",
    "the mechanic fixed the engine",
    "a squirrel buried nuts by the oak",
    "the tailor sewed a fine coat",
    "the lighthouse guided the ships home",
    "we picked ripe apples in the orchard",
    "the drummer kept a steady beat",
    "a mouse crept under the floor",
    "the glass shattered on the tiles",
    "she tied the ribbon in a bow",
    "the farmer plowed the east field",
    "the stars faded before the dawn",
    "he whistled for the dog to come",
    "the nurse checked on the patient",
    "a kite drifted high over the beach",
    "the carpenter measured the plank twice",
    "she brewed a pot of strong tea",
    "the ice cracked on the frozen lake",
    "the guard locked the gate at dusk",
    "a wolf howled far in the hills",
    "the cook added salt to the broth",
    "the twins share a room upstairs",
    "he mailed the package on monday",
    "the vines climbed the garden wall",
    "she spotted a whale from the cliff",
    "the engine roared down the track",
    "a leaf floated down the stream",
    "the tailor cut the cloth with care",
    "the scouts hiked up the steep trail",
    "he counted 9 coins in his pocket",
    "the smith hammered the hot iron",
    "she opened the window to the breeze",
    "the ferry crossed the bay at noon",
    "a hawk circled over the meadow",
    "the choir sang in the stone chapel",
    "the boy skipped stones on the pond",
    "we shared a meal at the long table",
    "the actor forgot his final line",
    "a storm gathered over the plains",
    "the fisherman mended his torn net",
    "she dried the herbs in the attic",
    "the climbers reached the peak by noon",
    "the owl watched from the hollow tree",
    "he swept the porch before supper",
    "the printer hummed in the office",
    "a lamb followed the flock home",
    "the tailor pressed the suit flat",
    "she picked berries by the fence",
    "the guide led us through the caves",
    "the radio crackled with the news",
    "a train whistle echoed at midnight",
    "the gardener trimmed the hedges",
    "he filled the tank with fresh water",
    "she wrapped the gift in silver paper",
    "a turtle crawled onto the warm rock",
    "the piano stood in the corner",
    "the map showed a path through the woods",
    "he rowed the boat against the current",
    "she hung the wash on the line",
    "the clerk stamped the papers",
    "he traded his old bike for a drum",
    "the lantern swung in the night wind",
    "the shepherd counted his flock",
    "a moth fluttered near the lamp",
    "the captain steered through the storm",
    "we danced until the music stopped",
    "the fox watched the hens from afar",
    "he saved 6 dollars for the fair",
    "the clouds parted after the long rain",
    "a pony grazed in the green pasture",
    "you run",
    "we sing songs",
    "the boy has a mask",
];
