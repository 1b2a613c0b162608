"""Writes the frozen golden prompt files for the car_1 fixture.

Run once; afterwards the files are frozen and the renderer must match them
byte for byte. Regenerating is only legitimate when the prompt formats
themselves are deliberately changed.
"""

from pathlib import Path

CONCISE = (
    "This is a task converting text into SQL statement. We will first given the dataset "
    "schema and then ask a question in text. You are asked to generate SQL statement.\n"
    " Here is the test question to be anwered: Convert text to SQL:\n"
    " [Schema (values)]: | car_1 | continents : contid , continent | countries : countryid , "
    "countryname , continent | car_makers : id , maker ( amc ) , fullname , country | "
    "model_list : modelid , maker , model ( amc ) | car_names : makeid , model ( amc ) , "
    "make ( amc hornet , amc hornet sportabout (sw) ) | cars_data : id , mpg , cylinders , "
    "edispl , horsepower , weight , accelerate , year;\n"
    " [Column names (type)]: continents : contid (number) | continents : continent (text) | "
    "countries : countryid (number) | countries : countryname (text) | countries : continent (number) | "
    "car_makers : id (number) | car_makers : maker (text) | car_makers : fullname (text) | "
    "car_makers : country (text) | model_list : modelid (number) | model_list : maker (number) | "
    "model_list : model (text) | car_names : makeid (number) | car_names : model (text) | "
    "car_names : make (text) | cars_data : id (number) | cars_data : mpg (text) | "
    "cars_data : cylinders (number) | cars_data : edispl (number) | cars_data : horsepower (text) | "
    "cars_data : weight (number) | cars_data : accelerate (number) | cars_data : year (number);\n"
    " [Primary Keys]: continents : contid | countries : countryid | car_makers : id | "
    "model_list : modelid | car_names : makeid | cars_data : id;\n"
    " [Foreign Keys]: countries : continent equals continents : contid | "
    "car_makers : country equals countries : countryid | model_list : maker equals car_makers : id | "
    "car_names : model equals model_list : model | cars_data : id equals car_names : makeid\n"
    " [Q]: What is the accelerate of the car make amc hornet sportabout (sw)?;\n"
    " [SQL]: "
)

VERBOSE = (
    "This is a task converting text into SQL statement. We will first given the dataset "
    "schema and then ask a question in text. You are asked to generate SQL statement.\n"
    " Here is the test question to be anwered: Let us take a question and turn it into a SQL "
    "statement about database tables. There are 6 tables. Their titles are: continents, "
    "countries, car_makers, model_list, car_names, cars_data. Table 1 is continents, and its "
    "column names and types are: ContId (Type is number), Continent (Type is text). Table 2 is "
    "countries, and its column names and types are: CountryId (Type is number), CountryName "
    "(Type is text), Continent (Type is number). Table 3 is car_makers, and its column names "
    "and types are: Id (Type is number), Maker (Type is text), FullName (Type is text), "
    "Country (Type is text). Table 4 is model_list, and its column names and types are: "
    "ModelId (Type is number), Maker (Type is number), Model (Type is text). Table 5 is "
    "car_names, and its column names and types are: MakeId (Type is number), Model (Type is "
    "text), Make (Type is text). Table 6 is cars_data, and its column names and types are: "
    "Id (Type is number), MPG (Type is text), Cylinders (Type is number), Edispl (Type is "
    "number), Horsepower (Type is text), Weight (Type is number), Accelerate (Type is number), "
    "Year (Type is number). The primary keys are: contid from Table continents, countryid from "
    "Table countries, id from Table car_makers, modelid from Table model_list, makeid from "
    "Table car_names, id from Table cars_data. The foreign keys are: continent from Table "
    "countries is equivalent with contid from Table continents, country from Table car_makers "
    "is equivalent with countryid from Table countries, maker from Table model_list is "
    "equivalent with id from Table car_makers, model from Table car_names is equivalent with "
    "model from Table model_list, id from Table cars_data is equivalent with makeid from Table "
    "car_names. Use foreign keys to join Tables. Columns with relevant values: Table "
    "car_makers Column maker have values: amc; Table model_list Column model have values: amc; "
    "Table car_names Column model have values: amc; Table car_names Column make have values: "
    "amc hornet, amc hornet sportabout (sw);  Only use columns with relevant values to "
    "generate SQL.  Let us take a text question and turn it into a SQL statement about "
    "database tables. The question is: What is the accelerate of the car make amc hornet "
    "sportabout (sw)? The corresponding SQL is: "
)

BASELINE = (
    "Complete sqlite SQL query only and with no explanation Sqlite SQL tables, with their "
    "properties: continents(ContId, Continent); countries(CountryId, CountryName, Continent); "
    "car_makers(Id, Maker, FullName, Country); model_list(ModelId, Maker, Model); "
    "car_names(MakeId, Model, Make); cars_data(Id, MPG, Cylinders, Edispl, Horsepower, Weight, "
    "Accelerate, Year).  What is the accelerate of the car make amc hornet sportabout (sw)? SELECT"
)


def main() -> None:
    root = Path(__file__).resolve().parents[1] / "tests" / "testdata" / "goldens"
    for design, text in [("concise", CONCISE), ("verbose", VERBOSE), ("baseline_default", BASELINE)]:
        target = root / design
        target.mkdir(parents=True, exist_ok=True)
        (target / "car_1__000000.txt").write_text(text, encoding="utf-8")
        print(f"wrote {target / 'car_1__000000.txt'} ({len(text)} bytes)")


if __name__ == "__main__":
    main()
