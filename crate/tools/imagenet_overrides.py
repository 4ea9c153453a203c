# idx -> offset  (resolved readings of the 1000-class list where several
# WordNet noun synsets share the class name and the ascending-offset chain
# leaves more than one feasible choice)
OVERRIDES = {
    55: 1729977,    # green snake, grass snake (North American)
    102: 1872401,   # echidna (Tachyglossus)
    277: 2119022,   # red fox, Vulpes vulpes
    278: 2119789,   # kit fox, Vulpes macrotis
    281: 2123045,   # tabby, tabby cat
    345: 2403003,   # ox (adult castrated bull)
    398: 2666196,   # abacus (calculator)
    406: 2699494,   # altar (raised structure)
    408: 2704792,   # amphibian, amphibious vehicle
    411: 2730930,   # apron (garment)
    417: 2782093,   # balloon (large gasbag)
    427: 2795169,   # barrel, cask
    431: 2804414,   # bassinet (hooded basket bed)
    438: 2815834,   # beaker (lab jar)
    443: 2834397,   # bib (apron top)
    446: 2840245,   # binder, ring-binder
    450: 2860847,   # bobsled (racing sled)
    456: 2879718,   # bow (weapon)
    458: 2892201,   # brass, memorial tablet, plaque
    468: 2930766,   # cab, hack, taxi, taxicab
    471: 2950826,   # cannon (heavy gun fired from tank)
    476: 2966193,   # carousel, merry-go-round
    483: 2980441,   # castle (fortified building)
    488: 2999410,   # chain (metal links)
    501: 3045698,   # cloak (covering)
    502: 3047690,   # clog, geta, patten, sabot
    506: 3065424,   # coil, spiral, volute, whorl, helix
    511: 3100240,   # convertible (car)
    520: 3131574,   # crib, cot
    529: 3188531,   # diaper, nappy, napkin
    536: 3216828,   # dock, dockage, docking facility
    538: 3220513,   # dome (hemispherical roof)
    541: 3249569,   # drum, membranophone, tympan
    544: 3259280,   # Dutch oven (metal box before fire)
    549: 3291819,   # envelope (for letters)
    553: 3337140,   # file, file cabinet, filing cabinet
    558: 3372029,   # flute, transverse flute
    562: 3388043,   # fountain (structure)
    578: 3450230,   # gown (woman's dress)
    586: 3478589,   # half track (military vehicle)
    587: 3481172,   # hammer (hand tool)
    594: 3495258,   # harp (chordophone)
    597: 3527444,   # holster (handgun sheath)
    600: 3532672,   # hook, claw (mechanical device)
    606: 3584829,   # iron, smoothing iron
    610: 3595614,   # jersey, T-shirt, tee shirt
    624: 3661043,   # library (building)
    628: 3673027,   # liner, ocean liner
    631: 3690938,   # lotion (cosmetic)
    636: 3709823,   # mailbag, postbag
    643: 3724870,   # mask (disguise)
    664: 3782006,   # monitor (checks transmissions)
    666: 3786901,   # mortar (bowl)
    667: 3787032,   # mortarboard (academic cap)
    693: 3873416,   # paddle, boat paddle
    697: 3877472,   # pajama, pyjama, pj's, jammies
    698: 3877845,   # palace (official residence)
    714: 3929660,   # pick, plectrum, plectron
    717: 3930630,   # pickup, pickup truck
    718: 3933933,   # pier (bridge support)
    723: 3944341,   # pinwheel (pinned wheel)
    726: 3954731,   # plane, carpenter's plane
    727: 3956157,   # planetarium (building)
    733: 3976657,   # pole (long rod)
    738: 3991062,   # pot, flowerpot
    742: 4004767,   # printer (computer output device)
    745: 4009552,   # projector (enlarged image)
    753: 4040759,   # radiator (engine cooling)
    758: 4067472,   # reel (fishing winder)
    766: 4111531,   # rotisserie (oven with spit)
    771: 4125021,   # safe (strongbox)
    778: 4141975,   # scale, weighing machine
    780: 4147183,   # schooner (sailing vessel)
    782: 4152593,   # screen, CRT screen
    783: 4153751,   # screw (fastener)
    787: 4192698,   # shield, buckler
    792: 4208210,   # shovel (hand tool)
    800: 4243546,   # slot, one-armed bandit
    801: 4251144,   # snorkel (swimmer's)
    813: 4270147,   # spatula (turner)
    815: 4275548,   # spider web (resembling)
    816: 4277352,   # spindle (spinning stick)
    819: 4296562,   # stage (platform)
    827: 4330267,   # stove (heating apparatus)
    830: 4336792,   # stretcher (litter)
    834: 4350905,   # suit, suit of clothes
    840: 4367480,   # swab, swob, mop
    844: 4372370,   # switch, electric switch
    847: 4389033,   # tank, army tank
    866: 4465501,   # tractor (farm)
    881: 4515003,   # upright, upright piano
    884: 4523831,   # vault (bank vault)
    894: 4550184,   # wardrobe, closet, press
    896: 4553703,   # washbasin, handbasin, washbowl
    897: 4554684,   # washer, automatic washer, washing machine
    902: 4579432,   # whistle (acoustic device)
    908: 4592741,   # wing (airfoil)
    910: 4597913,   # wooden spoon (kitchen)
    914: 4612504,   # yawl (ship's small boat)
    982: 10148035,  # groom, bridegroom (participant)
    987: 12144580,  # corn (kernels)
}
