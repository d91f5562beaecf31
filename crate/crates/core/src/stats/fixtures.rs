//! Frozen reference fixtures for the statistical tests, generated once
//! by an independent scientific-computing oracle and checked in.
//! Regenerating requires rebuilding the oracle environment; treat these
//! as constants.

pub const SW_NORMAL30: &[f64] = &[6.115069768622638, 6.423096515558875, 6.792356719048994, 6.951662255420597, 7.899843741299609, 8.226291131119481, 8.552445959272887, 8.865963973599472, 8.970922477954556, 8.978896764696287, 9.403670437673425, 9.440959204097725, 9.52417074850965, 9.906733313468756, 10.060157739104158, 10.256469686149256, 10.305009635385494, 10.312862811538478, 10.325704777243562, 10.554292170071765, 10.596762313643458, 10.927535416026418, 11.142152705844559, 11.174467017309329, 11.934701615251297, 12.108511392547822, 12.127550611643947, 12.27777703760989, 12.440495831741618, 12.447972669362008];
pub const SW_NORMAL30_W: f64 = 0.9525272125254749;
pub const SW_NORMAL30_P: f64 = 0.1974844304682173;
pub const SW_BIMODAL40: &[f64] = &[-3.6869964565669364, -3.266509289769474, -3.2597291585445456, -3.1737595996451287, -3.1141960191920632, -3.0811493632722438, -2.991550710043924, -2.976228117493906, -2.94789378555969, -2.9417814446693518, -2.877966001556637, -2.867868257072945, -2.7865206154052307, -2.7808465774104754, -2.7411884996226514, -2.6819850690064206, -2.6550363917626663, -2.6177099914374384, -2.466487985228624, -2.2615879792207814, 1.8375198730894242, 2.542418556814522, 2.5656904345159433, 2.56944582575828, 2.62751813900979, 2.6344523670505966, 2.727979970645626, 2.7415949702882414, 2.88180585127021, 2.895159557304622, 2.9633167868937655, 3.262393680767003, 3.276572627699276, 3.4089202479311562, 3.5186123219992598, 3.5501641846714467, 3.5911966665050454, 3.613746694800036, 3.6510907524847966, 3.764305685347353];
pub const SW_BIMODAL40_W: f64 = 0.7495077899062009;
pub const SW_BIMODAL40_P: f64 = 7.007615685279514e-07;
pub const SW_N3: &[f64] = &[-1.8626143608733758, -0.2743451880893701, 0.5578713585742109];
pub const SW_N3_W: f64 = 0.9685023307285487;
pub const SW_N3_P: f64 = 0.6592410575632458;
pub const SW_N5: &[f64] = &[0.212761968317962, 0.6637915102555878, 0.7549886255841474, 0.789164605049555, 2.282940417705887];
pub const SW_N5_W: f64 = 0.8019634367649036;
pub const SW_N5_P: f64 = 0.08406763872010313;
pub const SW_N8: &[f64] = &[4.868137611633024, 4.886935945281933, 4.89903211954806, 4.9913050158166, 5.087108129833612, 5.091855727929831, 5.164592298282932, 5.1856003059969655];
pub const SW_N8_W: f64 = 0.8915839962661583;
pub const SW_N8_P: f64 = 0.2420875978311529;
pub const SW_N11: &[f64] = &[0.048848652067433496, 0.052695882050373455, 0.07003021790495167, 0.10069200155002356, 0.21133485204706803, 0.21448737964952025, 0.23024730773695, 0.2628094568464395, 0.40153823497094154, 0.422091077007954, 0.47402049689286807];
pub const SW_N11_W: f64 = 0.9046232612378112;
pub const SW_N11_P: f64 = 0.21034559043513723;
pub const SW_N12: &[f64] = &[0.12083121308912942, 0.36795027006743847, 0.9402234978956678, 1.2723867318914113, 1.4548344798952764, 1.547892867557566, 1.9370384347916358, 2.5672250238199767, 2.5720988279286763, 2.665802601171349, 3.2736493684932446, 4.132015598876277];
pub const SW_N12_W: f64 = 0.9750808595889989;
pub const SW_N12_P: f64 = 0.956115144954467;
pub const SW_N25: &[f64] = &[-10.273762558954953, -8.850457258474616, -6.645670257164111, -6.18714473497826, -6.153027336234252, -5.9220808105647995, -5.874980283589487, -5.813771326238552, -4.618396057566542, -4.51036583342027, -4.363655531258088, -4.32518209575108, -4.263282133094517, -4.149193924189258, -3.552576230173954, -3.5111205089227147, -3.490114257240049, -2.445026920718958, -2.2379064423469157, -1.8100024900160236, -1.1496253782811765, -1.0462654768025454, -0.6063910866405546, -0.27907424307411466, 0.40317610192671083];
pub const SW_N25_W: f64 = 0.9695718564152692;
pub const SW_N25_P: f64 = 0.634229183275786;
pub const SW_N50: &[f64] = &[-0.8993081182045293, -0.8554937194534109, -0.8314805065061481, -0.8271332404975373, -0.8156063283240129, -0.7950607436134403, -0.772860341517762, -0.7725258042437504, -0.7601675519437185, -0.6801137260199968, -0.533168698612003, -0.5231993945741169, -0.4927621864377485, -0.49084919286942563, -0.4857132877627608, -0.4661777615400533, -0.387791173182509, -0.3592201988636845, -0.3134610734733083, -0.20296963685170422, -0.16204843229950128, -0.14533275858819095, -0.14251699750765234, -0.11647975989753423, -0.09936258537006637, -0.062298215993118244, 0.0022859742951764073, 0.08885053404412946, 0.18970083556075767, 0.1909366071264138, 0.23650172504224853, 0.24469932978646236, 0.3691461752752472, 0.4332912371450315, 0.478415148656939, 0.5101922742743348, 0.5484387065401719, 0.5576357913657071, 0.5601428460352986, 0.5767104615941916, 0.583927524386127, 0.5854892845673509, 0.6276204052877232, 0.6286862156391988, 0.6724334013361124, 0.7212667756213005, 0.7829663311243815, 0.808687968961842, 0.8268658556899413, 0.8824120188512046];
pub const SW_N50_W: f64 = 0.9224989800931307;
pub const SW_N50_P: f64 = 0.0029064795427772086;
pub const SW_N100: &[f64] = &[-2.478103243042408, -1.948863975684007, -1.8990179039595387, -1.808019222474536, -1.403842974920612, -1.3058030473230668, -1.301306734114222, -1.2795027725905879, -1.1949331589665046, -1.191937731460885, -1.1836311974389526, -1.0804520947448872, -1.074673359695114, -1.0668464614149242, -0.9932899851064834, -0.9753443982733911, -0.9670600211762836, -0.8324522491014079, -0.8322970269888572, -0.8256494199927434, -0.797771485634298, -0.7606400280332185, -0.6747349657106495, -0.6708502466094286, -0.639970750339911, -0.5919241868006877, -0.5517566932963649, -0.5237122580928527, -0.5080718160365376, -0.4714730548393372, -0.4103233738576236, -0.39473768072130244, -0.3656023256792431, -0.263768615429702, -0.2242229290043963, -0.19756883796337021, -0.12322402756094562, -0.10840833526440195, -0.06387990442296888, -0.0487408151514229, -0.03369811499160816, -0.029354135442526665, -0.011979201206084339, -0.0031642744051831578, 0.0007858248972838632, 0.0017189818633957374, 0.007297766625904134, 0.012017404526413115, 0.014277793310689048, 0.029980527241464754, 0.14994296100052557, 0.20512068721433768, 0.2147706327490598, 0.31156908923858867, 0.3147163377817884, 0.32751604680423335, 0.3304206791685995, 0.37365387886980683, 0.4462583486417808, 0.521378096810704, 0.5374392124337425, 0.540109393532165, 0.5420548568221824, 0.5445925244685289, 0.5476546393235394, 0.5653598774001958, 0.6088862980131855, 0.622198122425923, 0.6385466844690385, 0.6447425999355993, 0.65899631025747, 0.6612071142003654, 0.6843956374203135, 0.6845139009832532, 0.7099211409528949, 0.7187199895822288, 0.7691193697514285, 0.8174551476532702, 0.8580917317361297, 0.9300969844101962, 0.9409974367033958, 0.997077998101289, 1.0336772660099425, 1.0724602508184924, 1.0756726075652547, 1.1694515258346558, 1.1842196132253453, 1.2376581201446788, 1.3349053732991547, 1.3942878562088659, 1.4361392793600645, 1.5195055728795197, 1.5352104529750688, 1.5987875027603604, 1.6251398884550652, 1.7988279180297277, 1.8339287967279903, 2.0262852880356608, 2.1068315747909887, 2.3428159682139293];
pub const SW_N100_W: f64 = 0.9925872433380875;
pub const SW_N100_P: f64 = 0.8619612402022838;
pub const SW_N500: &[f64] = &[0.0006943305095029716, 0.0013886416930981148, 0.0017936486925994853, 0.0056860782876241075, 0.009536489930795864, 0.010574549804674394, 0.013924917035238658, 0.021920931230689257, 0.023016851054289706, 0.029464853201595444, 0.02975049103121355, 0.03025602589691314, 0.03131934532918276, 0.03313847151693732, 0.04060133569098019, 0.041834385039363875, 0.04790381444860731, 0.04935665747073071, 0.051123253703031384, 0.052250260349348945, 0.052470949154105384, 0.05987493082391716, 0.06009171649421683, 0.06378444699173486, 0.06464388092515394, 0.06718332098684274, 0.06734800302473412, 0.06807807557769764, 0.07383022880656534, 0.07696549510766651, 0.0790681453714823, 0.08090586969770538, 0.08303739359297371, 0.08562067184116719, 0.0865261615227623, 0.08848355418238035, 0.08915688080853447, 0.08933458978118837, 0.09248038746808789, 0.09325267624480288, 0.09499366394732073, 0.09621948143654294, 0.09795155093503777, 0.10018227796613231, 0.10163045048692469, 0.1020476939472989, 0.102312457441646, 0.1037717410213293, 0.1088521242041697, 0.1130862488002582, 0.12036692823571994, 0.12156595621829853, 0.12296033270186621, 0.12344702512149505, 0.12348116574727867, 0.12359641729023517, 0.12387697644280445, 0.12721667980530946, 0.1312119078523397, 0.13430045024639184, 0.13491157889871513, 0.13851896892714816, 0.1396803026774098, 0.14101630659102177, 0.14153247384801176, 0.14464160506080276, 0.1474926690849657, 0.14996459303243093, 0.15412385898879064, 0.15624043084469616, 0.15637778587379297, 0.1619637124589601, 0.16529950786213993, 0.17240763527540323, 0.1728103218625404, 0.17765597245112308, 0.17907921235004354, 0.17978200461624935, 0.17984321567722417, 0.18131263693125443, 0.18229891454033625, 0.1840302699659506, 0.1856172627405138, 0.1888311401424929, 0.19334729323001, 0.19665400409137385, 0.1976560854467106, 0.20188097487902346, 0.20713473543315294, 0.21320337329776776, 0.22321309607541467, 0.22338457513168655, 0.22354182746383747, 0.22604101621746975, 0.2272354010568774, 0.23130323569687858, 0.2336424715695108, 0.24023252626960867, 0.24249438170063267, 0.24550832642265918, 0.2516308444862087, 0.2545476816126086, 0.25484681812629556, 0.25535536555951655, 0.2629269101619094, 0.2632944094084145, 0.26546943128264405, 0.2679121318226905, 0.2733585259340374, 0.2740023059730858, 0.2753912628722249, 0.2881603164369381, 0.2897104028217573, 0.2900096801785099, 0.29345167544875367, 0.2935291759716197, 0.29588698424423393, 0.2990151903859922, 0.3027948844298703, 0.30590160706912156, 0.30672114770670045, 0.30678445578528096, 0.32026879882140685, 0.3217808411270199, 0.3253045357349067, 0.3255089932280497, 0.3258834961319298, 0.3260771970891543, 0.33242586660827583, 0.33395582990539663, 0.336261863576733, 0.3389842323846975, 0.3460384728091918, 0.3501775430636272, 0.3538039645474287, 0.3567108518898204, 0.3576375442208719, 0.36399488060553714, 0.36433485029087165, 0.36537899880404945, 0.3664702785832752, 0.3670991528321555, 0.367477988874697, 0.3751112785410655, 0.37577316572889174, 0.38336715963100393, 0.38476772739529735, 0.38597920860385226, 0.38639765265178594, 0.3905560985552434, 0.3969488640207582, 0.3971685851939132, 0.3991954484086814, 0.4029926244712827, 0.4048951587058743, 0.4083621970110491, 0.40852513307006316, 0.41437513396567177, 0.41599199380705365, 0.42321664367696676, 0.4301915068582827, 0.43218940496046965, 0.4348470864741177, 0.43753559172812456, 0.4434372961043255, 0.4477375577573498, 0.44999109835866286, 0.46052298311603235, 0.46341271012082075, 0.4682008112717109, 0.47066962378003474, 0.4709238372295221, 0.4719212839072498, 0.4743031618297667, 0.47682487207656177, 0.4798487872541642, 0.4818983432403495, 0.4831325251286337, 0.49010968404691735, 0.4928248027349638, 0.5079772688791684, 0.5090168624633773, 0.5091126056506857, 0.516905570710072, 0.5206148785304614, 0.5210222101334608, 0.5254006680436997, 0.5265449588380962, 0.5302935957920212, 0.5344776345700896, 0.5450325648899977, 0.5478280272987526, 0.5480135082930485, 0.5481873480982317, 0.5500927177260229, 0.5508912993976792, 0.552904097117091, 0.5580262658048991, 0.5608014553715088, 0.5644083507691108, 0.564604406553853, 0.5679770764860443, 0.569893398054563, 0.573061689570885, 0.5913374943093296, 0.5937271262666372, 0.5940135034810383, 0.5975906404967117, 0.6084877737130399, 0.6122903578293958, 0.61284137563029, 0.621920272959656, 0.6288917757681347, 0.6394902135739895, 0.6462010974692167, 0.6517867529856894, 0.653075497562553, 0.6556764971735766, 0.6582191491468136, 0.662650178301649, 0.6652207538491609, 0.6652871784360063, 0.6801238731609772, 0.682796976636677, 0.6842298193638863, 0.68511917261281, 0.6914115431454726, 0.7037182018288923, 0.7041371693111144, 0.708438658472341, 0.708944766161453, 0.7107645857315312, 0.7114409969574326, 0.7123672048086797, 0.7129906779621218, 0.7130785429751234, 0.7158102426947555, 0.7158636107592038, 0.7201446357985904, 0.7254025376154485, 0.7301200488240601, 0.7312124106493502, 0.7345785700149721, 0.7386330503586854, 0.7398671910803578, 0.7459274409533876, 0.7566970361135992, 0.7592245077197751, 0.7609880844389243, 0.7727883153150285, 0.7731450559617918, 0.7823343946546771, 0.8002820824524532, 0.8024658128736378, 0.8085504988451283, 0.8108226095423005, 0.8274584370791795, 0.8337130886905054, 0.8491677189750054, 0.8534003308204077, 0.8554410563544645, 0.8575551837876475, 0.8617944265406143, 0.8713414717771336, 0.8717725535044486, 0.8749079553091881, 0.8768640976311775, 0.8849937089737684, 0.8915850227344022, 0.8932355660155686, 0.8971567636872767, 0.8979738267367988, 0.9015843457559344, 0.9021389754974062, 0.9050228212709505, 0.9054454951000763, 0.9244617721106556, 0.9308053380906639, 0.9348065116517175, 0.9377238269106724, 0.9380677418963768, 0.9384608512778346, 0.9431532048481747, 0.9617166952601, 0.9726111252908437, 0.9776644055166673, 0.9838907202836535, 0.9849798243797592, 0.9891679126244535, 0.9961071771081297, 0.9972481836621493, 1.0005851347114703, 1.0147673527924597, 1.016584123335945, 1.0203001596553227, 1.0216386507502555, 1.0263756345328414, 1.0348018324521107, 1.0390044369199896, 1.0414609242188397, 1.0542909590598495, 1.0544000645690443, 1.0604478302825562, 1.0606412212069642, 1.067110341824342, 1.071760234392808, 1.0781578967830192, 1.0836498358082198, 1.0849080431812708, 1.0853169416515216, 1.0881195832931947, 1.0886465070687668, 1.094771537473765, 1.1050734163350904, 1.1083949014536223, 1.1098049092619635, 1.1143753881416132, 1.1162672877619277, 1.1231954759293667, 1.135796652621556, 1.13732862182828, 1.142430439413695, 1.1493352934394345, 1.1558958905368368, 1.157691641618281, 1.1658541537107416, 1.1715524977096268, 1.1897143583286716, 1.190116981965589, 1.193813747577775, 1.1944730586558707, 1.1952522033895256, 1.1967122239637038, 1.211894615082635, 1.2120734294219824, 1.2142026926222884, 1.2190389557593528, 1.2241583134850158, 1.2257789320464332, 1.2279059318703307, 1.231487962240259, 1.2315877284429402, 1.2363625578311381, 1.2436361350680452, 1.2558343733676198, 1.2606209267054336, 1.270618279203042, 1.2734235933458733, 1.282469405970409, 1.3180252456779415, 1.349465668512597, 1.3597997546593734, 1.3666184335477172, 1.3747683414667817, 1.374927282755567, 1.3851341868219924, 1.3943381031046809, 1.4107890041926734, 1.4462277352927457, 1.4544701733877152, 1.454570244470136, 1.457720172993496, 1.4604403488961282, 1.4745511529592867, 1.47840931467963, 1.485483294041334, 1.528676860302995, 1.531014590019879, 1.5318365658423383, 1.544954255502292, 1.5461154876521677, 1.5608853491388337, 1.5684593911259308, 1.5724540632723205, 1.5984655818493894, 1.6012010506473193, 1.617000201928704, 1.6234503435581524, 1.625522386808121, 1.6424519641604614, 1.6583962692254475, 1.6632846689423324, 1.701620344453986, 1.718551613910611, 1.7240101861229404, 1.7313869322432036, 1.7478119908738152, 1.770416065373979, 1.7714215968555678, 1.7731391920807262, 1.7893515564084235, 1.7893872009258396, 1.8059097405731404, 1.8377703076044154, 1.8389995362359313, 1.8400857165705422, 1.8427747403913615, 1.8509882438593852, 1.8700250530946418, 1.8706950551296402, 1.8749517440729078, 1.8774013799741023, 1.8926215781413815, 1.9042417204370858, 1.9053199260672815, 1.9239194336285255, 1.9451611908756519, 1.9569363930979407, 1.9574532721007811, 1.9584385275355387, 1.9712505071380106, 1.9825186050370351, 1.998967298819543, 2.0034063717847443, 2.009363477516682, 2.0201416213645933, 2.0232548157095507, 2.0263188393817932, 2.0284317622978056, 2.0507270364132064, 2.0850735279564487, 2.1292113749109802, 2.1471367464138287, 2.181816567593224, 2.192415920753457, 2.2003399062644955, 2.2117101349184254, 2.2256907851898724, 2.240807123225365, 2.254778926167571, 2.263182835278177, 2.281507519966305, 2.2818506101840845, 2.309168500817378, 2.327976651547365, 2.3319275223864926, 2.344645371699214, 2.35164447070629, 2.373873402535085, 2.3977823388973607, 2.417045924896295, 2.428216868820772, 2.4402716070999806, 2.452816832101497, 2.465746080760385, 2.4726764853177703, 2.4791412875741754, 2.4945885012800613, 2.5145643995436586, 2.5371915005789436, 2.53836749696833, 2.547128889113221, 2.5832676258001395, 2.617961177423352, 2.6422428195267087, 2.644401182866681, 2.644775928268887, 2.6448659077116496, 2.7119299126755227, 2.7341306575402697, 2.7506031375048123, 2.763941468267588, 2.7644619685026557, 2.847899199924923, 2.8776323028678097, 2.8852303345218613, 2.9336470119708347, 2.941799481495724, 2.946248199273529, 2.9770886652584356, 2.997574024187722, 3.090688125945693, 3.1056388892743176, 3.1158806725120023, 3.2587768572672666, 3.285390644961629, 3.299954453365992, 3.3546959831694503, 3.4096662875341575, 3.4928021522181205, 3.514861672760802, 3.60830023022883, 3.627449815159485, 3.629529195844862, 3.691104203642608, 3.712219937628177, 3.751599468923553, 3.802564596110084, 3.896473481433108, 3.9461047069865836, 4.116413005187568, 4.117372616501726, 4.11938018966305, 4.291922721283414, 4.511002980265709, 4.588227534756811, 4.609077084437724, 5.579156548267568, 5.9434184032378035, 6.463939265781145];
pub const SW_N500_W: f64 = 0.8504915468489376;
pub const SW_N500_P: f64 = 2.299822444917473e-21;
pub const WX_PAIRS10_A: &[f64] = &[125.0, 115.0, 130.0, 140.0, 140.0, 115.0, 140.0, 125.0, 140.0, 135.0];
pub const WX_PAIRS10_B: &[f64] = &[110.0, 122.0, 125.0, 120.0, 140.0, 124.0, 123.0, 137.0, 135.0, 145.0];
pub const WX_PAIRS10_RPLUS: f64 = 27.0;
pub const WX_PAIRS10_P: f64 = 0.6352893188352069;
pub const WX_PAIRS10_NEFF: usize = 9;
pub const WX_HEAVYTIES30_A: &[f64] = &[57.0, 52.0, 54.0, 44.0, 58.0, 54.0, 59.0, 48.0, 43.0, 46.0, 49.0, 44.0, 57.0, 47.0, 51.0, 48.0, 46.0, 40.0, 41.0, 57.0, 44.0, 50.0, 53.0, 51.0, 50.0, 58.0, 43.0, 56.0, 51.0, 46.0];
pub const WX_HEAVYTIES30_B: &[f64] = &[57.0, 54.0, 53.0, 46.0, 58.0, 52.0, 57.0, 50.0, 43.0, 43.0, 47.0, 45.0, 59.0, 44.0, 50.0, 50.0, 46.0, 39.0, 43.0, 56.0, 47.0, 49.0, 53.0, 54.0, 48.0, 56.0, 46.0, 58.0, 48.0, 46.0];
pub const WX_HEAVYTIES30_RPLUS: f64 = 144.5;
pub const WX_HEAVYTIES30_P: f64 = 0.8842965372484043;
pub const WX_HEAVYTIES30_NEFF: usize = 24;
pub const WX_CONT30_A: &[f64] = &[49.69564775708073, 46.04917351526567, 57.919494639673474, 40.908552193104605, 58.17995812862635, 45.62765600131419, 50.44762010259167, 51.19385496743538, 54.85822664920554, 55.41193403847771, 57.275047889782876, 52.07083500669293, 48.824009576802055, 45.79741539610885, 49.12600725006396, 54.50699252393838, 39.9806546635543, 52.37294450097063, 47.75645822500189, 46.44679674118674, 47.55416271716484, 53.091907683194, 53.84480769975392, 44.930395025705316, 53.134116484202345, 52.98042295029112, 52.89128196272914, 49.86457311255234, 60.728801620879565, 45.58518642809236];
pub const WX_CONT30_B: &[f64] = &[47.45620882383713, 49.21405988962984, 59.813446236604754, 40.36089313651162, 59.2783982351803, 43.33301864288677, 49.82062331647301, 53.526467762989746, 56.54176952069573, 56.12790133141004, 58.13873569682453, 50.89941952164799, 45.55164317975728, 46.14403660740734, 48.37675606127316, 53.42129172916792, 37.93144640806676, 55.24658119926838, 48.41748735383826, 48.77282021012831, 49.97667559215143, 53.72487235043468, 52.69078708215449, 42.48118011959668, 53.345693647147144, 57.4247542599933, 53.18471648126914, 50.91942258616408, 64.43512858287822, 47.93881024294907];
pub const WX_CONT30_RPLUS: f64 = 169.0;
pub const WX_CONT30_P: f64 = 0.19504254430407164;
pub const WX_CONT30_NEFF: usize = 30;
