"""Shared sample tables and records used across the test modules.

These mirror real items from the four source corpora (financial-report
QA, sentiment phrases, table QA) so tests exercise realistic cell
formats: currency prefixes, thousands separators, accounting negatives,
and empty cells.
"""

from toolqa.tabular import Table, infer_types, parse_table
from toolqa.templates import Record

# 1928 football round: 7 columns, 6 rows, one numeric column ("Crowd").
VENUE_TABLE_TEXT = (
    '{"header": ["Home team", "Home team score", "Away team", "Away team score",'
    ' "Venue", "Crowd", "Date"],'
    ' "rows": [["North Melbourne", "12.10 (82)", "South Melbourne", "11.14 (80)",'
    ' "Arden Street Oval", "6,000", "4 August 1928"],'
    ' ["Fitzroy", "13.12 (90)", "Footscray", "12.17 (89)", "Brunswick Street Oval",'
    ' "12,000", "4 August 1928"],'
    ' ["Richmond", "11.13 (79)", "Melbourne", "7.8 (50)", "Punt Road Oval",'
    ' "26,000", "4 August 1928"],'
    ' ["Geelong", "4.14 (38)", "Essendon", "12.10 (82)", "Corio Oval", "10,000",'
    ' "4 August 1928"],'
    ' ["Hawthorn", "9.9 (63)", "Collingwood", "17.18 (120)", "Glenferrie Oval",'
    ' "5,000", "4 August 1928"],'
    ' ["St Kilda", "13.15 (93)", "Carlton", "10.9 (69)", "Junction Oval", "31,000",'
    ' "4 August 1928"]],'
    ' "types": ["text", "text", "text", "text", "text", "real", "text"],'
    ' "caption": "Round 15"}'
)

VENUE_SQL = ("SELECT SUM([Crowd]) FROM data_table"
             " WHERE LOWER([Venue]) = LOWER('glenferrie oval')")


def venue_table() -> Table:
    return parse_table(VENUE_TABLE_TEXT)


def _grid(header, rows) -> Table:
    return Table(header=header, rows=rows, col_types=infer_types(header, rows))


# Earnings-per-share filing: question answered by an arithmetic equation.
EPS_TABLE = _grid(
    ["", "", "Year ended December 31,", ""],
    [
        ["", "2019", "2018", "2017"],
        ["Basic:", "", "", ""],
        ["Net earnings attributable to Black Knight", "$108.8", "$168.5", "$182.3"],
        ["Shares used for basic net earnings per share:", "", "", ""],
        ["Weighted average shares of common stock outstanding", "147.7", "147.6", "88.7"],
        ["Basic net earnings per share", "$0.74", "$1.14", "$2.06"],
        ["Diluted:", "", "", ""],
        ["Earnings before income taxes and equity in losses of unconsolidated affiliates", "", "", "$192.4"],
        ["Income tax benefit excluding the effect of noncontrolling interests", "", "", "(32.2)"],
        ["Net earnings", "", "", "$224.6"],
        ["Net earnings attributable to Black Knight", "$108.8", "$168.5", ""],
        ["Shares used for diluted net earnings per share:", "", "", ""],
        ["Weighted average shares of common stock outstanding", "147.7", "147.6", "88.7"],
        ["Dilutive effect of unvested restricted shares of common", "", "", ""],
        ["stock", "0.9", "0.6", "0.6"],
        ["Weighted average shares of BKFS Class B common stock outstanding", "", "", "63.1"],
        ["Weighted average shares of common stock, diluted", "148.6", "148.2", "152.4"],
        ["Diluted net earnings per share", "$0.73", "$1.14", "$1.47"],
    ],
)

EPS_INPUT = (
    "(5) Earnings Per Share Basic earnings per share is computed by dividing Net "
    "earnings attributable to Black Knight by the weighted-average number of shares "
    "of common stock outstanding during the period. For the periods presented, "
    "potentially dilutive securities include unvested restricted stock awards and "
    "the shares of BKFS Class B common stock prior to the Distribution."
)

EPS_RECORD = Record(
    instruction="What was the change in the basic net earnings per share between 2017 and 2019?",
    input=EPS_INPUT,
    data=EPS_TABLE,
    derivation="0.74-2.06",
    response="-1.32",
    dataset_tag="tatqa",
)

# Unrecognized-tax-benefit reconciliation: answered by extraction, not a tool.
TAX_TABLE = _grid(
    ["", "Year ended March 31,", ""],
    [
        ["", "2019", "2018"],
        ["Beginning balance", "$6,164", "$4,931"],
        ["Additions based on tax positions related to current year", "164", "142"],
        ["Additions for tax positions of prior years", "231", "1,444"],
        ["Reductions due to change in foreign exchange rate  ", "(301)", "(353)"],
        ["Expiration of statutes of limitation", "(165)", ""],
        ["Reductions due to settlements with tax authorities", "(77)", ""],
        ["Ending balance", "$6,016", "$6,164"],
    ],
)

TAX_RECORD = Record(
    instruction="What was the Additions based on tax positions related to current year in 2019 and 2018 respectively?",
    input=(
        "A reconciliation of the beginning and ending amount of unrecognized tax "
        "benefits is as follows: Interest and penalty charges, if any, related to "
        "uncertain tax positions are classified as income tax expense in the "
        "accompanying consolidated statements of operations."
    ),
    data=TAX_TABLE,
    response="164, 142",
    dataset_tag="tatqa",
)

# Stock-vesting table: a division answered by the calculator.
VESTING_TABLE = _grid(
    ["", "Option Awards", "", "Stock Awards", ""],
    [
        ["Name", "Number of Shares Acquired on Exercise (#)", "Value Realized on Exercise ($)",
         "Number of Shares Acquired on Vesting (#)", "Value Realized on Vesting ($)"],
        ["Jon Kirchner", "", "", "153,090", "3,428,285"],
        ["Robert Andersen", "", "", "24,500", "578,806"],
        ["Paul Davis", "", "", "20,500", "482,680"],
        ["Murali Dharan", "", "", "15,000", "330,120"],
        ["Geir Skaaden", "", "", "21,100", "500,804"],
    ],
)

VESTING_RECORD = Record(
    instruction="What is the average value per share that Robert Andersen acquired on vesting?",
    input=(
        "Option Exercises and Stock Vested The table below sets forth information "
        "concerning the number of shares acquired on exercise of option awards and "
        "vesting of stock awards in 2019 and the value realized upon vesting by such "
        "officers."
    ),
    data=VESTING_TABLE,
    derivation="578,806/24,500",
    response="23.62",
    dataset_tag="tatqa",
)

# Sentiment phrases.
SENTIMENT_NEUTRAL_RECORD = Record(
    instruction="Determine the sentiment of the following.",
    input="The plant will be fired with a combination of spruce bark, chipped logging residues or milled peat.",
    response="neutral",
    dataset_tag="fpb",
)

SENTIMENT_POSITIVE_RECORD = Record(
    instruction="Determine the sentiment of the following.",
    input="Operating profit improved by 27% to EUR 579.8mn from EUR 457.2mn in 2006.",
    response="positive",
    dataset_tag="fpb",
)

# Table question answered by a SQL script.
VENUE_RECORD = Record(
    instruction="How many people watched at Glenferrie Oval?",
    data=venue_table(),
    derivation=VENUE_SQL,
    dataset_tag="wikisql",
)

# Airports listing: multi-hop question answered by extraction.
AIRPORT_TABLE = _grid(
    ["Community", "Airport name", "Type", "ICAO", "IATA"],
    [
        ["Albury", "Albury Airport", "Public", "YMAY", "ABX"],
        ["Armidale", "Armidale Airport", "Public", "YARM", "ARM"],
        ["Ballina", "Ballina Byron Gateway Airport", "Public", "YBNA", "BNK"],
        ["Balranald", "Balranald Airport", "Public", "YBRN", "BZD"],
        ["Bankstown , Sydney", "Bankstown Airport", "Airschool", "YSBK", "BWU"],
        ["Bathurst", "Bathurst Airport", "Public", "YBTH", "BHS"],
        ["Bourke", "Bourke Airport", "Public", "YBKE", "BRK"],
        ["Brewarrina", "Brewarrina Airport", "Public", "YBRW", "BWQ"],
        ["Broken Hill", "Broken Hill Airport", "Public", "YBHI", "BHQ"],
        ["Camden", "Camden Airport", "Public", "YSCN", "CDU"],
        ["Cessnock", "Cessnock Airport", "Public", "YCNK", "CES"],
        ["Cobar", "Cobar Airport", "Public", "YCBA", "CAZ"],
        ["Coffs Harbour", "Coffs Harbour Airport", "Public", "YCFS", "CFS"],
        ["Collarenebri", "Collarenebri Airport", "Public", "YCBR", "CRB"],
        ["Condobolin", "Condobolin Airport", "Public", "YCDO", "CBX"],
        ["Coolah", "Coolah Airport", "Public", "YCAH", ""],
        ["Cooma", "Cooma - Polo Flat Airport", "Public", "YPFT", ""],
        ["Cooma", "Cooma - Snowy Mountains Airport", "Public", "YCOM", "OOM"],
        ["Coonabarabran", "Coonabarabran Airport", "Public", "YCBB", "COJ"],
        ["Coonamble", "Coonamble Airport", "Public", "YCNM", "CNB"],
    ],
)

AIRPORT_RECORD = Record(
    instruction="How many kilometers is the airport from the Australian city known for housing the Towsers Huts?",
    data=AIRPORT_TABLE,
    response="3",
    dataset_tag="ottqa",
)

# Hedge-gains filing: the router should send this to the arithmetic template.
HEDGE_TABLE = _grid(
    ["(In millions)", "", "", ""],
    [
        ["Year Ended June 30,", "2019", "2018", "2017"],
        ["Effective Portion", "", "", ""],
        ["Gains recognized in other comprehensive income (loss), net of tax of $1, $11, and $4",
         "$  159", "$  219", "$  328"],
        ["Gains reclassified from accumulated other comprehensive income (loss) into revenue",
         "341", "185", "555"],
        ["Amount Excluded from Effectiveness Assessment and Ineffective Portion", "", "", ""],
        ["Losses recognized in other income (expense), net", "(64)", "(255)", "(389)"],
    ],
)

HEDGE_RECORD = Record(
    instruction=(
        "What was the % change in gains recognized in other comprehensive income "
        "(loss), net of tax of $1, $11, and $4 from 2018 to 2019?"
    ),
    input=(
        "Cash Flow Hedge Gains (Losses) We recognized the following gains (losses) "
        "on foreign exchange contracts designated as cash flow hedges: We do not "
        "have any net derivative gains included in AOCI as of June 30, 2019 that "
        "will be reclassified into earnings within the following 12 months. No "
        "significant amounts of gains (losses) were reclassified from AOCI into "
        "earnings as a result of forecasted transactions that failed to occur "
        "during fiscal year 2019."
    ),
    data=HEDGE_TABLE,
    derivation="(159-219)/219",
    response="-27.4%",
    dataset_tag="tatqa",
)

# Population-density listing: the router should send this to the script template.
DENSITY_TABLE = Table(
    header=["Administrative division", "Area (km) 2011**",
            "Population 2001 Census (Adjusted)", "Population 2011 Census (Adjusted)",
            "Population density (/km 2011)"],
    rows=[
        ["Dhaka District", "1,463.6", "9036647", "12517361", "8,552.4"],
        ["=> Savar Upazila", "282.11", "629695", "1442885", "5,114.6"],
        ["=> Keraniganj Upazila", "166.82", "649373", "824538", "4,942.68"],
        ["Narayanganj District", "684.37", "2300514", "3074078", "4,491.8"],
        ["=> Narayanganj Sadar Upazila", "100.74", "946205", "1381796", "13,716.5"],
        ["=> Bandar Upazila", "54.39", "267021", "327149", "6,014.8"],
        ["=> Rupganj Upazila", "176.48", "423135", "558192", "3,162.9"],
        ["Gazipur District", "1,806.36", "2143200", "3548115", "1,964.2"],
        ["=> Gazipur Sadar Upazila", "457.67", "925454", "1899575", "4,150.5"],
        ["=> Kaliakair Upazila", "314.13", "278967", "503976", "1,604.3"],
        ["Narsingdi District", "1,150.14", "1983499", "2314899", "2,012.7"],
        ["=> Narsingdi Sadar Upazila", "213.43", "606474", "737362", "3,454.8"],
        ["=> Palash Upazila", "94.43", "198106", "221979", "2,350.7"],
    ],
    col_types=["text", "text", "real", "real", "text"],
)

DENSITY_RECORD = Record(
    instruction="In what division was there a population density in km2 of 4,491.8 in 2011?",
    data=DENSITY_TABLE,
    derivation=("SELECT [Administrative division] FROM data_table WHERE "
                "LOWER([Population density (/km 2011)]) = LOWER('4,491.8')"),
    dataset_tag="wikisql",
)

ALL_SAMPLE_RECORDS = [
    EPS_RECORD,
    TAX_RECORD,
    VESTING_RECORD,
    SENTIMENT_NEUTRAL_RECORD,
    SENTIMENT_POSITIVE_RECORD,
    VENUE_RECORD,
    AIRPORT_RECORD,
    HEDGE_RECORD,
    DENSITY_RECORD,
]
