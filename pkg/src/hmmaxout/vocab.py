"""Embedded English word list for synthetic words, lexicons and distractors."""

WORDS = tuple("""
about above across action actor added after again against agent agree ahead alarm album
alert alive allow alone along alpha amber among anchor angle animal answer apple april
arena argue armor arrow artist asked aspect atlas attic audio august autumn avenue award
baker balance ballet bamboo banana banner barrel basket battle beach beacon beauty become
before begin behind belief below bench berry beyond bicycle binary bird blanket blast blend
block bloom board bonus border bottle bottom bounce bright bring broad broken bronze brother
bubble bucket budget buffer build bundle burger butter button cabin cable cactus camera
campus canal candle canyon carbon cargo carpet castle casual cattle center chain chair
change chapel charge cheese cherry chess choice circle citizen city claim classic clean
clever client climb clock closet cloud coast coffee collar colony column comedy comfort
common copper corner cotton county couple course cousin cover crane credit crowd crystal
culture curtain custom daily damage dance danger dealer debate decade decent delta demand
dental desert design detail device diary dinner direct doctor dollar domain donkey double
dragon drama drawer dream driver during eagle early earth easily eastern editor effect
eight either elbow eleven empire energy engine enough entire equal escape estate event
every exact exit expert export fabric factor fairly falcon family famous farmer father
feature fellow fence fiber field figure filter final finger finish flame flash flight
floor flower focus follow forest forget formal fortune forum fossil fourth frame freedom
fresh friend frozen fruit fulfil funny future galaxy garage garden garlic gather gentle
giant ginger glass global glory golden gospel govern grace grain grand gravity green
ground growth guard guest guitar habit hammer handle happen harbor harvest health heart
heaven height helmet hidden highway history hobby holiday honey horizon horse hotel house
humble hunger hunter island ivory jacket jaguar jelly jewel joint journal journey judge
jungle junior justice kettle kidney kingdom kitchen knight label ladder lagoon lamp language
laptop large laser later launch lawyer layer leader league lemon lesson letter level
liberty library light limit linen lion liquid little lizard local lodge logic lonely
lumber lunch machine magnet major mammal manner marble margin market master matter meadow
medal member memory mental mercy method middle minute mirror mobile modern moment monkey
month moral mother motion mountain museum music napkin narrow nation native nature nearby
needle nephew nerve network never night noble normal north notice novel number object
ocean office olive onion opera option orange orbit orchid order organ origin outer oxygen
oyster palace panel paper parade parent parrot party pastry patch pencil people pepper
period person phone piano picnic picture pilot planet plastic plenty pocket poetry point
polar police pony popular potato powder praise prefer pretty price prince prison profit
public puzzle pyramid quality quarter queen quick quiet rabbit racing radar radio random
rapid razor reader record region remote repair rescue result return ribbon river robot
rocket rubber safety salad salmon sample sandal saturn school science screen season second
secret select senior series seven shadow shelter shield silver simple singer sister
smooth soccer social socket soldier source spider spirit spring square stable station
stone storm street studio summer sunset supply symbol system table talent target taxi
temple tennis theory thunder ticket tiger timber tomato tongue topic tower travel tribe
tunnel turkey twelve twenty uniform united unity update upper useful valley velvet victory
video village violin visit vital voice volume voyage wagon walnut wander warm water
wealth weather wedding wheel window winter wisdom wonder wooden world writer yellow
yogurt young zebra zero zone
""".split())
